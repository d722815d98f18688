#include "stochfrac/fracnum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace stochfrac {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_deriv_order(const FracOrder& order, const char* who) {
    if (order.alpha == 1.0 || order.alpha == 2.0 || order.alpha <= 0.0 || order.alpha >= 2.0)
        throw std::invalid_argument(std::string(who) +
                                    ": alpha must lie in (0,1) or (1,2); integer orders are "
                                    "ordinary derivatives (use finite_diff)");
}

/// Scaled Grunwald-Letnikov weights h^{-alpha} * (-1)^k binom(alpha, k).
/// Shared by the pointwise operator and matrix assembly so both see
/// bit-identical coefficients.
std::vector<double> gl_scaled_weights(double alpha, int count, double h) {
    const double scale = std::pow(h, -alpha);
    std::vector<double> w(static_cast<std::size_t>(count));
    double g = 1.0;
    w[0] = scale;
    for (int k = 1; k < count; ++k) {
        g *= (static_cast<double>(k) - 1.0 - alpha) / static_cast<double>(k);
        w[static_cast<std::size_t>(k)] = scale * g;
    }
    return w;
}

/// Piecewise-linear product quadrature of the order-mu RL integral:
/// exact integration of the kernel against the linear interpolant of f.
/// weight(i, j) is the coefficient of f_j in the value at node i >= 1.
struct IntegralWeights {
    double mu;
    double scale;  // h^mu / Gamma(mu)
    std::vector<double> pm;   // m^mu
    std::vector<double> pm1;  // m^(mu+1)

    IntegralWeights(double mu_, int n, double h) : mu(mu_) {
        scale = std::pow(h, mu) / std::tgamma(mu);
        pm.resize(static_cast<std::size_t>(n));
        pm1.resize(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m) {
            pm[static_cast<std::size_t>(m)] = std::pow(static_cast<double>(m), mu);
            pm1[static_cast<std::size_t>(m)] = std::pow(static_cast<double>(m), mu + 1.0);
        }
    }

    // int_{m-1}^{m} v^{mu-1} (1 - m + v) dv
    double A(int m) const {
        const double dm = pm[static_cast<std::size_t>(m)] - pm[static_cast<std::size_t>(m - 1)];
        const double dm1 = pm1[static_cast<std::size_t>(m)] - pm1[static_cast<std::size_t>(m - 1)];
        return (1.0 - static_cast<double>(m)) * dm / mu + dm1 / (mu + 1.0);
    }
    // int_{m-1}^{m} v^{mu-1} (m - v) dv
    double B(int m) const {
        const double dm = pm[static_cast<std::size_t>(m)] - pm[static_cast<std::size_t>(m - 1)];
        const double dm1 = pm1[static_cast<std::size_t>(m)] - pm1[static_cast<std::size_t>(m - 1)];
        return static_cast<double>(m) * dm / mu - dm1 / (mu + 1.0);
    }

    double weight(int i, int j) const {
        if (j == 0) return scale * A(i);
        if (j == i) return scale * B(1);
        return scale * (B(i - j + 1) + A(i - j));
    }
};

GriddedFn apply_left_integral(const GriddedFn& f, double mu) {
    const int n = f.size();
    IntegralWeights w(mu, n, f.grid.h);
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int i = 1; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j <= i; ++j) acc += w.weight(i, j) * f[j];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return GriddedFn(f.grid, std::move(out));
}

GriddedFn apply_left_gl(const GriddedFn& f, double alpha, bool abs_weights) {
    const int n = f.size();
    std::vector<double> sw = gl_scaled_weights(alpha, n, f.grid.h);
    if (abs_weights)
        for (auto& v : sw) v = std::abs(v);
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int i = 1; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j <= i; ++j) acc += sw[static_cast<std::size_t>(i - j)] * f[j];
        out[static_cast<std::size_t>(i)] = acc;
    }
    out[0] = out[1];  // anchor node: RL derivative is singular at t=a
    return GriddedFn(f.grid, std::move(out));
}

GriddedFn finite_diff_abs(const GriddedFn& f, int order) {
    const int n = f.size();
    require(n >= order + 2, "finite_diff_abs: grid too small");
    const double h = f.grid.h;
    std::vector<double> d(static_cast<std::size_t>(n));
    if (order == 1) {
        const double w = 1.0 / (2.0 * h);
        d[0] = (3.0 * f[0] + 4.0 * f[1] + f[2]) * w;
        for (int i = 1; i < n - 1; ++i) d[static_cast<std::size_t>(i)] = (f[i + 1] + f[i - 1]) * w;
        d[static_cast<std::size_t>(n - 1)] = (3.0 * f[n - 1] + 4.0 * f[n - 2] + f[n - 3]) * w;
    } else {
        const double w = 1.0 / (h * h);
        d[0] = (2.0 * f[0] + 5.0 * f[1] + 4.0 * f[2] + f[3]) * w;
        for (int i = 1; i < n - 1; ++i)
            d[static_cast<std::size_t>(i)] = (f[i + 1] + 2.0 * f[i] + f[i - 1]) * w;
        d[static_cast<std::size_t>(n - 1)] =
            (2.0 * f[n - 1] + 5.0 * f[n - 2] + 4.0 * f[n - 3] + f[n - 4]) * w;
    }
    return GriddedFn(f.grid, std::move(d));
}

std::vector<double> series_coeffs(double alpha, int N) {
    // (-1)^(k-1) alpha / (k! (k - alpha) Gamma(1 - alpha)); the k = 0 factor
    // (-1)^(-1) is read as -1, which makes the k = 0 term f(t)(t-a)^(-alpha)/Gamma(1-alpha).
    std::vector<double> c(static_cast<std::size_t>(N) + 1);
    const double g1ma = std::tgamma(1.0 - alpha);
    double factorial = 1.0;
    double sign = -1.0;  // (-1)^(k-1) at k = 0
    for (int k = 0; k <= N; ++k) {
        if (k > 0) {
            factorial *= static_cast<double>(k);
            sign = -sign;
        }
        c[static_cast<std::size_t>(k)] =
            sign * alpha / (factorial * (static_cast<double>(k) - alpha) * g1ma);
    }
    return c;
}

GriddedFn apply_left_series(const GriddedFn& f, double alpha, int N, bool abs_weights) {
    const int n = f.size();
    std::vector<double> c = series_coeffs(alpha, N);
    if (abs_weights)
        for (auto& v : c) v = std::abs(v);
    std::vector<GriddedFn> derivs;
    derivs.push_back(f);
    for (int k = 1; k <= N; ++k)
        derivs.push_back(abs_weights ? finite_diff_abs(f, k) : finite_diff(f, k));
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int i = 1; i < n; ++i) {
        const double dt = static_cast<double>(i) * f.grid.h;  // t_i - a
        double acc = 0.0;
        for (int k = 0; k <= N; ++k)
            acc += c[static_cast<std::size_t>(k)] * derivs[static_cast<std::size_t>(k)][i] *
                   std::pow(dt, static_cast<double>(k) - alpha);
        out[static_cast<std::size_t>(i)] = acc;
    }
    out[0] = out[1];  // (t-a)^(-alpha) singular at the anchor
    return GriddedFn(f.grid, std::move(out));
}

template <typename LeftOp>
GriddedFn with_side(const GriddedFn& f, Side side, LeftOp&& left_op) {
    if (side == Side::left) return left_op(f);
    return reflect(left_op(reflect(f)));
}

void check_series_args(double alpha, int N, int n_nodes) {
    require(alpha > 0.0 && alpha < 1.0, "series_deriv: alpha must lie in (0,1)");
    require(N >= 0 && N <= 2,
            "series_deriv: N must be 0, 1 or 2 (higher N needs more initial data)");
    require(n_nodes >= N + 2, "series_deriv: grid too small for requested N");
}

}  // namespace

FracOrder FracOrder::of(double alpha) {
    if (!std::isfinite(alpha) || alpha <= 0.0)
        throw std::invalid_argument("FracOrder: alpha must be positive");
    FracOrder o;
    o.alpha = alpha;
    o.n = static_cast<int>(std::floor(alpha)) + 1;
    return o;
}

std::string to_string(Side s) { return s == Side::left ? "left" : "right"; }

std::string to_string(const Backend& b) {
    switch (b.kind) {
        case BackendKind::grunwald_letnikov: return "gl";
        case BackendKind::l1_quadrature: return "l1";
        case BackendKind::truncated_series: return "series(N=" + std::to_string(b.series_terms) + ")";
    }
    return "?";
}

GriddedFn rl_integral(const GriddedFn& f, FracOrder order, Side side) {
    require(order.alpha > 0.0, "rl_integral: alpha must be positive");
    return with_side(f, side, [&](const GriddedFn& g) { return apply_left_integral(g, order.alpha); });
}

GriddedFn rl_integral_abs(const GriddedFn& band, FracOrder order, Side side) {
    // product-quadrature weights are nonnegative, so the plain apply is the envelope
    return rl_integral(band, order, side);
}

GriddedFn rl_deriv(const GriddedFn& f, FracOrder order, Side side, Backend backend) {
    check_deriv_order(order, "rl_deriv");
    switch (backend.kind) {
        case BackendKind::grunwald_letnikov:
            return with_side(f, side,
                             [&](const GriddedFn& g) { return apply_left_gl(g, order.alpha, false); });
        case BackendKind::l1_quadrature:
            return with_side(f, side, [&](const GriddedFn& g) {
                GriddedFn integ =
                    apply_left_integral(g, static_cast<double>(order.n) - order.alpha);
                GriddedFn d = finite_diff(integ, order.n);
                d[0] = d[1];
                return d;
            });
        case BackendKind::truncated_series:
            require(order.alpha < 1.0, "rl_deriv: truncated_series requires alpha in (0,1)");
            return series_deriv(f, order.alpha, side, backend.series_terms);
    }
    throw std::invalid_argument("rl_deriv: unknown backend");
}

GriddedFn rl_deriv_abs(const GriddedFn& band, FracOrder order, Side side, Backend backend) {
    check_deriv_order(order, "rl_deriv_abs");
    switch (backend.kind) {
        case BackendKind::grunwald_letnikov:
            return with_side(band, side,
                             [&](const GriddedFn& g) { return apply_left_gl(g, order.alpha, true); });
        case BackendKind::l1_quadrature:
            return with_side(band, side, [&](const GriddedFn& g) {
                GriddedFn integ =
                    apply_left_integral(g, static_cast<double>(order.n) - order.alpha);
                GriddedFn d = finite_diff_abs(integ, order.n);
                d[0] = d[1];
                return d;
            });
        case BackendKind::truncated_series:
            require(order.alpha < 1.0, "rl_deriv_abs: truncated_series requires alpha in (0,1)");
            return series_deriv_abs(band, order.alpha, side, backend.series_terms);
    }
    throw std::invalid_argument("rl_deriv_abs: unknown backend");
}

GriddedFn caputo_deriv(const GriddedFn& f, FracOrder order, Side side) {
    check_deriv_order(order, "caputo_deriv");
    require(f.size() >= order.n + 2, "caputo_deriv: grid too small for finite_diff of order n");
    return with_side(f, side, [&](const GriddedFn& g) {
        return apply_left_integral(finite_diff(g, order.n),
                                   static_cast<double>(order.n) - order.alpha);
    });
}

GriddedFn caputo_deriv_abs(const GriddedFn& band, FracOrder order, Side side) {
    check_deriv_order(order, "caputo_deriv_abs");
    return with_side(band, side, [&](const GriddedFn& g) {
        return apply_left_integral(finite_diff_abs(g, order.n),
                                   static_cast<double>(order.n) - order.alpha);
    });
}

GriddedFn series_deriv(const GriddedFn& f, double alpha, Side side, int N) {
    check_series_args(alpha, N, f.size());
    return with_side(f, side,
                     [&](const GriddedFn& g) { return apply_left_series(g, alpha, N, false); });
}

GriddedFn series_deriv_abs(const GriddedFn& band, double alpha, Side side, int N) {
    check_series_args(alpha, N, band.size());
    return with_side(band, side,
                     [&](const GriddedFn& g) { return apply_left_series(g, alpha, N, true); });
}

Eigen::MatrixXd finite_diff_matrix(const Grid& grid, int order) {
    require(order == 1 || order == 2, "finite_diff_matrix: order must be 1 or 2");
    const int n = grid.n_nodes;
    require(n >= order + 2, "finite_diff_matrix: grid too small");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    const double h = grid.h;
    if (order == 1) {
        const double w = 1.0 / (2.0 * h);
        m(0, 0) = -3.0 * w;
        m(0, 1) = 4.0 * w;
        m(0, 2) = -w;
        for (int i = 1; i < n - 1; ++i) {
            m(i, i - 1) = -w;
            m(i, i + 1) = w;
        }
        m(n - 1, n - 1) = 3.0 * w;
        m(n - 1, n - 2) = -4.0 * w;
        m(n - 1, n - 3) = w;
    } else {
        const double w = 1.0 / (h * h);
        m(0, 0) = 2.0 * w;
        m(0, 1) = -5.0 * w;
        m(0, 2) = 4.0 * w;
        m(0, 3) = -w;
        for (int i = 1; i < n - 1; ++i) {
            m(i, i - 1) = w;
            m(i, i) = -2.0 * w;
            m(i, i + 1) = w;
        }
        m(n - 1, n - 1) = 2.0 * w;
        m(n - 1, n - 2) = -5.0 * w;
        m(n - 1, n - 3) = 4.0 * w;
        m(n - 1, n - 4) = -w;
    }
    return m;
}

namespace {

Eigen::MatrixXd left_matrix(const Grid& grid, MatrixKind kind, FracOrder order) {
    const int n = grid.n_nodes;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    switch (kind) {
        case MatrixKind::rl_integral: {
            require(order.alpha > 0.0, "operator_matrix: alpha must be positive");
            IntegralWeights w(order.alpha, n, grid.h);
            for (int i = 1; i < n; ++i)
                for (int j = 0; j <= i; ++j) m(i, j) = w.weight(i, j);
            break;
        }
        case MatrixKind::rl_deriv: {
            check_deriv_order(order, "operator_matrix(rl_deriv)");
            std::vector<double> sw = gl_scaled_weights(order.alpha, n, grid.h);
            for (int i = 1; i < n; ++i)
                for (int j = 0; j <= i; ++j) m(i, j) = sw[static_cast<std::size_t>(i - j)];
            m.row(0) = m.row(1);  // anchor node policy, same as the pointwise operator
            break;
        }
        case MatrixKind::caputo_deriv: {
            check_deriv_order(order, "operator_matrix(caputo_deriv)");
            require(n >= order.n + 2, "operator_matrix: grid too small for caputo_deriv");
            IntegralWeights w(static_cast<double>(order.n) - order.alpha, n, grid.h);
            Eigen::MatrixXd fd = finite_diff_matrix(grid, order.n);
            // banded product: row k of fd has at most 4 nonzeros
            for (int i = 1; i < n; ++i)
                for (int k = 0; k <= i; ++k) {
                    const double wik = w.weight(i, k);
                    int lo = k - 1, hi = k + 1;
                    if (k == 0) lo = 0, hi = std::min(n - 1, 3);          // one-sided start stencil
                    if (k == n - 1) lo = std::max(0, n - 4), hi = n - 1;  // one-sided end stencil
                    for (int j = lo; j <= hi; ++j)
                        if (fd(k, j) != 0.0) m(i, j) += wik * fd(k, j);
                }
            break;
        }
    }
    return m;
}

}  // namespace

OperatorMatrix operator_matrix(const Grid& grid, MatrixKind kind, Side side, FracOrder order) {
    OperatorMatrix om;
    om.grid = grid;
    om.kind = kind;
    om.side = side;
    om.order = order;
    Eigen::MatrixXd left = left_matrix(grid, kind, order);
    if (side == Side::left) {
        om.entries = std::move(left);
    } else {
        const int n = grid.n_nodes;
        om.entries.resize(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) om.entries(i, j) = left(n - 1 - i, n - 1 - j);
    }
    return om;
}

GriddedFn OperatorMatrix::apply(const GriddedFn& f) const {
    if (!f.grid.same_as(grid)) throw std::invalid_argument("OperatorMatrix::apply: grid mismatch");
    const int n = grid.n_nodes;
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    // column order matches the pointwise operators (reflection reverses the
    // accumulation direction), so GL and integral matrices reproduce them bit-exactly
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        if (side == Side::left) {
            for (int j = 0; j < n; ++j) acc += entries(i, j) * f[j];
        } else {
            for (int j = n - 1; j >= 0; --j) acc += entries(i, j) * f[j];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return GriddedFn(f.grid, std::move(out));
}

}  // namespace stochfrac
