#pragma once

#include <functional>
#include <string>

#include "stochfrac/ensemble.hpp"
#include "stochfrac/fracnum.hpp"

namespace stochfrac {

enum class LagrangianKind { quadratic_bilinear, kinetic_potential, custom };
enum class DerivFlavor { riemann_liouville, caputo };

/// Named potentials for the kinetic Lagrangian: zero, harmonic (x^2/2), quartic (x^4/4).
struct Potential {
    std::function<double(double)> value;
    std::function<double(double)> grad;
};
Potential potential_function(const std::string& id);

/// Named custom Lagrangians for the CLI/config layer: zero, x_squared.
std::function<double(double, double, double, double)> custom_lagrangian(const std::string& id);

/// Integrand L(t, x, d_left, d_right). Built-in kinds carry analytic partial
/// derivatives; custom callables are differentiated by central differences
/// with relative step 1e-6.
struct Lagrangian {
    LagrangianKind kind = LagrangianKind::quadratic_bilinear;
    DerivFlavor flavor = DerivFlavor::riemann_liouville;
    double coeff = 1.0;                // quadratic_bilinear: L = coeff * dl * dr
    double mass = 1.0;                 // kinetic_potential: L = m/4 (dl^2 + dr^2) - V(x)
    std::string potential_id = "zero";
    std::function<double(double, double, double, double)> fn;  // custom

    static Lagrangian quadratic_bilinear(double c,
                                         DerivFlavor fl = DerivFlavor::riemann_liouville);
    static Lagrangian kinetic_potential(double m, const std::string& potential,
                                        DerivFlavor fl = DerivFlavor::riemann_liouville);
    static Lagrangian custom(std::function<double(double, double, double, double)> f,
                             DerivFlavor fl = DerivFlavor::riemann_liouville);

    double eval(double t, double x, double dl, double dr) const;
    double d_x(double t, double x, double dl, double dr) const;
    double d_dl(double t, double x, double dl, double dr) const;
    double d_dr(double t, double x, double dl, double dr) const;
};

struct VariationalProblem {
    Lagrangian lagrangian;
    Grid grid;
    FracOrder alpha;  // in (0,1)
    double X_a = 0.0;
    double X_b = 0.0;

    void validate() const;
};

struct Extremal {
    GriddedFn mean;  // boundary values imposed exactly
    double J_value = 0.0;
    GriddedFn el_residual;
    double el_residual_norm = 0.0;  // masked interior sup
};

/// Trapezoid quadrature of the Lagrangian along a candidate mean path.
/// The mean must hit the boundary values to within 1e-12.
double evaluate_J(const VariationalProblem& p, const GriddedFn& mean);

/// Pointwise Euler-Lagrange defect dL/dx + D_right[dL/d(dl)] + D_left[dL/d(dr)]
/// with RL or Caputo operators per the Lagrangian flavor. Endpoint nodes are
/// zeroed (the RL kernels are singular there).
GriddedFn el_residual(const VariationalProblem& p, const GriddedFn& mean);

/// Direct two-operator assembly of the kinetic Lagrangian's stationarity
/// defect, m/2 [D_left(D_right x) + D_right(D_left x)] - V'(x); equals
/// el_residual for kinetic_potential up to rounding. Used as an independent
/// cross-check route.
GriddedFn newton_form_residual(const VariationalProblem& p, const GriddedFn& mean);

/// The composed-order operator form D^{2 alpha}_left x + D^{2 alpha}_right x.
/// Reported alongside the EL residual; the composed form presumes an operator
/// composition law that does not hold exactly for mixed left/right products,
/// so equality with el_residual is never asserted.
GriddedFn composed_order_form(const VariationalProblem& p, const GriddedFn& mean);

/// Direct solver for the quadratic bilinear functional (RL flavor): builds the
/// discrete J with GL operator matrices and trapezoid weights, imposes the
/// boundary values, and solves the interior stationarity system by LU with
/// partial pivoting.
Extremal solve_quadratic(const VariationalProblem& p);

struct StationarityReport {
    double grad_inf = 0.0;           // sup norm of the interior discrete gradient
    double hessian_row_scale = 0.0;  // max row 1-norm of the discrete Hessian
    double relative = 0.0;           // grad_inf / (row_scale * max(1, |mean|_inf))
};
StationarityReport quadratic_stationarity(const VariationalProblem& p, const GriddedFn& mean);

/// Projected gradient descent on the interior node values with Armijo
/// backtracking (J is nonincreasing along iterates) and Barzilai-Borwein
/// steps. Works for any Lagrangian kind; init must satisfy the boundary values.
Extremal solve_descent(const VariationalProblem& p, const GriddedFn& init, int steps,
                       double rate);

struct C1HNormReport {
    double sup_H_norm = 0.0;      // sup_t ensemble RMS
    double sup_left_deriv = 0.0;  // sup_t |D1|
    double sup_right_deriv = 0.0; // sup_t |D2|
    double total = 0.0;           // sum of the three components
};

/// Grid estimate of the C1(I->H) norm; sups exclude the endpoint nodes where
/// the RL derivative of a non-vanishing mean is singular.
C1HNormReport c1h_norm(const Ensemble& e, FracOrder alpha);

/// The worked example preset: alpha = 0.25 on [0.01, 0.99] with unit boundary
/// values and the bilinear Lagrangian.
VariationalProblem example2_problem(int n_nodes = 99);

}  // namespace stochfrac
