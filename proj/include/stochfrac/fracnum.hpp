#pragma once

#include <Eigen/Dense>

#include "stochfrac/grid.hpp"

namespace stochfrac {

/// Fractional order alpha > 0 with n = floor(alpha) + 1, so n-1 <= alpha < n.
struct FracOrder {
    double alpha = 0.5;
    int n = 1;

    static FracOrder of(double alpha);  // validates alpha > 0, finite
};

enum class Side { left, right };

enum class BackendKind { grunwald_letnikov, l1_quadrature, truncated_series };

struct Backend {
    BackendKind kind = BackendKind::grunwald_letnikov;
    int series_terms = 1;  // N for truncated_series

    static Backend gl() { return {BackendKind::grunwald_letnikov, 0}; }
    static Backend l1() { return {BackendKind::l1_quadrature, 0}; }
    static Backend series(int N) { return {BackendKind::truncated_series, N}; }
};

std::string to_string(Side s);
std::string to_string(const Backend& b);

/// Riemann-Liouville fractional integral of order alpha > 0 via piecewise-linear
/// product quadrature (exact kernel moments). The value at the anchor endpoint
/// (t=a for left, t=b for right) is 0. Right operators are evaluated by
/// reflection, so left/right mirror symmetry is exact.
GriddedFn rl_integral(const GriddedFn& f, FracOrder order, Side side);

/// Riemann-Liouville fractional derivative, alpha in (0,1) u (1,2).
/// Backends: Grunwald-Letnikov binomial weights (default); l1_quadrature
/// (finite_diff of the order n-alpha integral); truncated_series (the N-term
/// short expansion, alpha in (0,1) only). The derivative is singular at the
/// anchor endpoint when f does not vanish there; the anchor node carries the
/// first interior value instead of a divergent number.
GriddedFn rl_deriv(const GriddedFn& f, FracOrder order, Side side,
                   Backend backend = Backend::gl());

/// Caputo fractional derivative: order n-alpha integral of the n-th finite
/// difference ((-1)^n for the right side comes out of the reflection).
GriddedFn caputo_deriv(const GriddedFn& f, FracOrder order, Side side);

/// Truncated short expansion of the RL derivative:
///   left:  sum_{k=0}^{N} (-1)^(k-1) alpha f^(k)(t) / (k! (k-alpha) Gamma(1-alpha)) (t-a)^(k-alpha)
///   right: sum_{k=0}^{N}   -alpha    f^(k)(t) / (k! (k-alpha) Gamma(1-alpha)) (b-t)^(k-alpha)
/// alpha in (0,1), N in {0,1,2} (f^(k) from finite_diff). Anchor node policy as
/// in rl_deriv.
GriddedFn series_deriv(const GriddedFn& f, double alpha, Side side, int N);

/// |weight| variants of the above, used to propagate nonnegative
/// standard-error bands through the linear schemes. Not rigorous error
/// propagation; an upper-bound heuristic.
GriddedFn rl_integral_abs(const GriddedFn& band, FracOrder order, Side side);
GriddedFn rl_deriv_abs(const GriddedFn& band, FracOrder order, Side side,
                       Backend backend = Backend::gl());
GriddedFn caputo_deriv_abs(const GriddedFn& band, FracOrder order, Side side);
GriddedFn series_deriv_abs(const GriddedFn& band, double alpha, Side side, int N);

enum class MatrixKind { rl_deriv, rl_integral, caputo_deriv };

/// Dense matrix form of an operator on a fixed grid. For left GL derivatives
/// and integrals the matrix is lower-triangular (Toeplitz up to boundary rows)
/// and apply() reproduces the pointwise operator bit-exactly; the Caputo
/// matrix is the product of the integral and finite-difference matrices and
/// matches the staged pointwise operator to rounding reassociation.
struct OperatorMatrix {
    Grid grid;
    MatrixKind kind = MatrixKind::rl_deriv;
    Side side = Side::left;
    FracOrder order;
    Eigen::MatrixXd entries;

    GriddedFn apply(const GriddedFn& f) const;
};

OperatorMatrix operator_matrix(const Grid& grid, MatrixKind kind, Side side, FracOrder order);

/// Dense matrix of finite_diff (exposed for the variational solver's adjoint).
Eigen::MatrixXd finite_diff_matrix(const Grid& grid, int order);

}  // namespace stochfrac
