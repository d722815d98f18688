#include "stochfrac/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace stochfrac {

StochOpKind stoch_op_from_string(const std::string& s) {
    if (s == "d1") return StochOpKind::s_rl_deriv_left;
    if (s == "d2") return StochOpKind::s_rl_deriv_right;
    if (s == "d3") return StochOpKind::s_rl_int_left;
    if (s == "d4") return StochOpKind::s_rl_int_right;
    if (s == "d5") return StochOpKind::s_caputo_left;
    if (s == "d6") return StochOpKind::s_caputo_right;
    throw std::invalid_argument("unknown operator kind '" + s + "', expected d1..d6");
}

std::string to_string(StochOpKind k) {
    switch (k) {
        case StochOpKind::s_rl_deriv_left: return "d1";
        case StochOpKind::s_rl_deriv_right: return "d2";
        case StochOpKind::s_rl_int_left: return "d3";
        case StochOpKind::s_rl_int_right: return "d4";
        case StochOpKind::s_caputo_left: return "d5";
        case StochOpKind::s_caputo_right: return "d6";
    }
    return "?";
}

Side side_of(StochOpKind k) {
    switch (k) {
        case StochOpKind::s_rl_deriv_left:
        case StochOpKind::s_rl_int_left:
        case StochOpKind::s_caputo_left: return Side::left;
        default: return Side::right;
    }
}

StochOpResult apply(const Ensemble& e, StochOpKind kind, FracOrder order, Backend backend) {
    if (e.m_paths() < 1) throw std::invalid_argument("apply: empty ensemble");
    MeanPath mp = mean_path(e);
    const Side side = side_of(kind);
    StochOpResult r{GriddedFn{}, std::move(mp.mean), GriddedFn{}, backend};
    switch (kind) {
        case StochOpKind::s_rl_deriv_left:
        case StochOpKind::s_rl_deriv_right:
            r.value = rl_deriv(r.mean_used, order, side, backend);
            r.standard_error = rl_deriv_abs(mp.std_error, order, side, backend);
            break;
        case StochOpKind::s_rl_int_left:
        case StochOpKind::s_rl_int_right:
            r.backend = Backend::l1();  // single product-quadrature scheme
            r.value = rl_integral(r.mean_used, order, side);
            r.standard_error = rl_integral_abs(mp.std_error, order, side);
            break;
        case StochOpKind::s_caputo_left:
        case StochOpKind::s_caputo_right:
            r.backend = Backend::l1();
            r.value = caputo_deriv(r.mean_used, order, side);
            r.standard_error = caputo_deriv_abs(mp.std_error, order, side);
            break;
    }
    return r;
}

Prop1Bound prop1_bound(const Ensemble& e, FracOrder order) {
    if (order.alpha <= 0.0) throw std::invalid_argument("prop1_bound: alpha must be positive");
    MeanPath mp = mean_path(e);
    GriddedFn abs_mean = mp.mean;
    for (auto& v : abs_mean.values) v = std::abs(v);
    const double l1 = trapezoid(abs_mean);
    const Grid& g = e.grid();
    const double width_pow = std::pow(g.b - g.a, order.alpha - 1.0);
    double k = width_pow / std::tgamma(order.alpha);
    if (order.alpha < 1.0)
        k = std::max(width_pow, std::pow(g.h, order.alpha - 1.0)) / std::tgamma(order.alpha);
    GriddedFn integ = rl_integral(mp.mean, order, Side::left);
    return {k * l1, sup_abs(integ, 0, g.n_nodes), k, l1};
}

}  // namespace stochfrac
