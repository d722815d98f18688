#pragma once

#include "stochfrac/ensemble.hpp"
#include "stochfrac/fracnum.hpp"

namespace stochfrac {

/// The six stochastic fractional operators: an operator on the ensemble is the
/// corresponding deterministic operator applied to the estimated mean path.
enum class StochOpKind {
    s_rl_deriv_left,   // D1
    s_rl_deriv_right,  // D2
    s_rl_int_left,     // D3
    s_rl_int_right,    // D4
    s_caputo_left,     // D5
    s_caputo_right,    // D6
};

StochOpKind stoch_op_from_string(const std::string& s);  // accepts d1..d6
std::string to_string(StochOpKind k);
Side side_of(StochOpKind k);

struct StochOpResult {
    GriddedFn value;           // deterministic operator applied to mean_used
    GriddedFn mean_used;       // the sample mean path the operator acted on
    GriddedFn standard_error;  // |weight|-propagated band; heuristic, not rigorous
    Backend backend;
};

/// Applies the operator. The composition order is structural: expectation
/// first, then the deterministic fractional operator, so `value` equals the
/// fracnum operator of mean_path(e) bit-exactly.
/// Integrals accept any alpha > 0; derivatives need alpha in (0,1) u (1,2).
/// `backend` selects the derivative scheme and is ignored by the integrals.
StochOpResult apply(const Ensemble& e, StochOpKind kind, FracOrder order,
                    Backend backend = Backend::gl());

struct Prop1Bound {
    double bound;    // k * L1-norm of the mean path
    double sup_abs;  // sup over nodes of |left stochastic RL integral|
    double k;        // the documented constant
    double mean_l1;  // trapezoid of |mean|
};

/// Boundedness check constant: k = (b-a)^(alpha-1)/Gamma(alpha) for alpha >= 1;
/// for alpha < 1 the kernel is unbounded, so the bound uses the h-aware
/// majorant k = max((b-a)^(alpha-1), h^(alpha-1))/Gamma(alpha), valid for the
/// gridded quadrature on means without node-scale spikes.
Prop1Bound prop1_bound(const Ensemble& e, FracOrder order);

}  // namespace stochfrac
