#include "stochfrac/variational.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stochfrac {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double fd_step(double v) { return 1e-6 * std::max(1.0, std::abs(v)); }

GriddedFn deriv(const GriddedFn& f, FracOrder o, Side side, DerivFlavor flavor) {
    return flavor == DerivFlavor::riemann_liouville ? rl_deriv(f, o, side)
                                                    : caputo_deriv(f, o, side);
}

Eigen::VectorXd trapezoid_weights(const Grid& g) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(g.n_nodes, g.h);
    w(0) = 0.5 * g.h;
    w(g.n_nodes - 1) = 0.5 * g.h;
    return w;
}

int mask_cut(int n) { return std::max(1, static_cast<int>(std::ceil(0.05 * (n - 1)))); }

double masked_sup(const GriddedFn& f) {
    const int cut = mask_cut(f.size());
    return sup_abs(f, cut, f.size() - cut);
}

void check_boundary(const VariationalProblem& p, const GriddedFn& mean, const char* who) {
    if (!mean.grid.same_as(p.grid)) throw std::invalid_argument(std::string(who) + ": grid mismatch");
    const int n = mean.size();
    if (std::abs(mean[0] - p.X_a) > 1e-12 || std::abs(mean[n - 1] - p.X_b) > 1e-12)
        throw std::invalid_argument(std::string(who) +
                                    ": mean does not satisfy the boundary values");
}

struct QuadraticSystem {
    Eigen::MatrixXd hessian;  // d2 Jdisc / dm2, symmetric
    Eigen::MatrixXd a_left, a_right;
    Eigen::VectorXd w;
};

QuadraticSystem quadratic_system(const VariationalProblem& p) {
    QuadraticSystem s;
    s.a_left = operator_matrix(p.grid, MatrixKind::rl_deriv, Side::left, p.alpha).entries;
    s.a_right = operator_matrix(p.grid, MatrixKind::rl_deriv, Side::right, p.alpha).entries;
    s.w = trapezoid_weights(p.grid);
    const double c = p.lagrangian.coeff;
    Eigen::MatrixXd wl = s.w.asDiagonal() * s.a_right;
    Eigen::MatrixXd wr = s.w.asDiagonal() * s.a_left;
    s.hessian = c * (s.a_left.transpose() * wl + s.a_right.transpose() * wr);
    return s;
}

}  // namespace

Potential potential_function(const std::string& id) {
    if (id == "zero") return {[](double) { return 0.0; }, [](double) { return 0.0; }};
    if (id == "harmonic")
        return {[](double x) { return 0.5 * x * x; }, [](double x) { return x; }};
    if (id == "quartic")
        return {[](double x) { return 0.25 * x * x * x * x; },
                [](double x) { return x * x * x; }};
    throw std::invalid_argument("unknown potential id: " + id);
}

std::function<double(double, double, double, double)> custom_lagrangian(const std::string& id) {
    if (id == "zero") return [](double, double, double, double) { return 0.0; };
    if (id == "x_squared") return [](double, double x, double, double) { return x * x; };
    throw std::invalid_argument("unknown custom lagrangian id: " + id);
}

Lagrangian Lagrangian::quadratic_bilinear(double c, DerivFlavor fl) {
    Lagrangian l;
    l.kind = LagrangianKind::quadratic_bilinear;
    l.flavor = fl;
    l.coeff = c;
    return l;
}

Lagrangian Lagrangian::kinetic_potential(double m, const std::string& potential, DerivFlavor fl) {
    Lagrangian l;
    l.kind = LagrangianKind::kinetic_potential;
    l.flavor = fl;
    l.mass = m;
    l.potential_id = potential;
    potential_function(potential);  // validate
    return l;
}

Lagrangian Lagrangian::custom(std::function<double(double, double, double, double)> f,
                              DerivFlavor fl) {
    Lagrangian l;
    l.kind = LagrangianKind::custom;
    l.flavor = fl;
    l.fn = std::move(f);
    return l;
}

double Lagrangian::eval(double t, double x, double dl, double dr) const {
    switch (kind) {
        case LagrangianKind::quadratic_bilinear: return coeff * dl * dr;
        case LagrangianKind::kinetic_potential:
            return 0.25 * mass * (dl * dl + dr * dr) - potential_function(potential_id).value(x);
        case LagrangianKind::custom: return fn(t, x, dl, dr);
    }
    return 0.0;
}

double Lagrangian::d_x(double t, double x, double dl, double dr) const {
    switch (kind) {
        case LagrangianKind::quadratic_bilinear: return 0.0;
        case LagrangianKind::kinetic_potential: return -potential_function(potential_id).grad(x);
        case LagrangianKind::custom: {
            const double s = fd_step(x);
            return (fn(t, x + s, dl, dr) - fn(t, x - s, dl, dr)) / (2.0 * s);
        }
    }
    return 0.0;
}

double Lagrangian::d_dl(double t, double x, double dl, double dr) const {
    switch (kind) {
        case LagrangianKind::quadratic_bilinear: return coeff * dr;
        case LagrangianKind::kinetic_potential: return 0.5 * mass * dl;
        case LagrangianKind::custom: {
            const double s = fd_step(dl);
            return (fn(t, x, dl + s, dr) - fn(t, x, dl - s, dr)) / (2.0 * s);
        }
    }
    return 0.0;
}

double Lagrangian::d_dr(double t, double x, double dl, double dr) const {
    switch (kind) {
        case LagrangianKind::quadratic_bilinear: return coeff * dl;
        case LagrangianKind::kinetic_potential: return 0.5 * mass * dr;
        case LagrangianKind::custom: {
            const double s = fd_step(dr);
            return (fn(t, x, dl, dr + s) - fn(t, x, dl, dr - s)) / (2.0 * s);
        }
    }
    return 0.0;
}

void VariationalProblem::validate() const {
    if (!(alpha.alpha > 0.0 && alpha.alpha < 1.0))
        throw std::invalid_argument("VariationalProblem: alpha must lie in (0,1)");
    if (!std::isfinite(X_a) || !std::isfinite(X_b))
        throw std::invalid_argument("VariationalProblem: boundary values must be finite");
    if (lagrangian.kind == LagrangianKind::custom && !lagrangian.fn)
        throw std::invalid_argument("VariationalProblem: custom Lagrangian has no callable");
}

double evaluate_J(const VariationalProblem& p, const GriddedFn& mean) {
    check_boundary(p, mean, "evaluate_J");
    GriddedFn dl = deriv(mean, p.alpha, Side::left, p.lagrangian.flavor);
    GriddedFn dr = deriv(mean, p.alpha, Side::right, p.lagrangian.flavor);
    GriddedFn integrand = mean;
    for (int i = 0; i < mean.size(); ++i)
        integrand[i] = p.lagrangian.eval(p.grid.node(i), mean[i], dl[i], dr[i]);
    return trapezoid(integrand);
}

GriddedFn el_residual(const VariationalProblem& p, const GriddedFn& mean) {
    check_boundary(p, mean, "el_residual");
    const int n = mean.size();
    GriddedFn dl = deriv(mean, p.alpha, Side::left, p.lagrangian.flavor);
    GriddedFn dr = deriv(mean, p.alpha, Side::right, p.lagrangian.flavor);
    GriddedFn p3 = mean, p4 = mean;
    for (int i = 0; i < n; ++i) {
        const double t = p.grid.node(i);
        p3[i] = p.lagrangian.d_dl(t, mean[i], dl[i], dr[i]);
        p4[i] = p.lagrangian.d_dr(t, mean[i], dl[i], dr[i]);
    }
    GriddedFn term3 = deriv(p3, p.alpha, Side::right, p.lagrangian.flavor);
    GriddedFn term4 = deriv(p4, p.alpha, Side::left, p.lagrangian.flavor);
    GriddedFn res = mean;
    for (int i = 0; i < n; ++i) {
        const double t = p.grid.node(i);
        res[i] = p.lagrangian.d_x(t, mean[i], dl[i], dr[i]) + term3[i] + term4[i];
    }
    res[0] = 0.0;
    res[n - 1] = 0.0;
    return res;
}

GriddedFn newton_form_residual(const VariationalProblem& p, const GriddedFn& mean) {
    if (p.lagrangian.kind != LagrangianKind::kinetic_potential)
        throw std::invalid_argument("newton_form_residual: kinetic_potential Lagrangian required");
    check_boundary(p, mean, "newton_form_residual");
    const int n = mean.size();
    GriddedFn dl = deriv(mean, p.alpha, Side::left, p.lagrangian.flavor);
    GriddedFn dr = deriv(mean, p.alpha, Side::right, p.lagrangian.flavor);
    GriddedFn ldr = deriv(dr, p.alpha, Side::left, p.lagrangian.flavor);
    GriddedFn rdl = deriv(dl, p.alpha, Side::right, p.lagrangian.flavor);
    const auto pot = potential_function(p.lagrangian.potential_id);
    GriddedFn res = mean;
    for (int i = 0; i < n; ++i)
        res[i] = 0.5 * p.lagrangian.mass * (ldr[i] + rdl[i]) - pot.grad(mean[i]);
    res[0] = 0.0;
    res[n - 1] = 0.0;
    return res;
}

GriddedFn composed_order_form(const VariationalProblem& p, const GriddedFn& mean) {
    check_boundary(p, mean, "composed_order_form");
    const auto o2 = FracOrder::of(2.0 * p.alpha.alpha);
    GriddedFn left = rl_deriv(mean, o2, Side::left);
    GriddedFn right = rl_deriv(mean, o2, Side::right);
    GriddedFn res = mean;
    for (int i = 0; i < mean.size(); ++i) res[i] = left[i] + right[i];
    res[0] = 0.0;
    res[mean.size() - 1] = 0.0;
    return res;
}

Extremal solve_quadratic(const VariationalProblem& p) {
    p.validate();
    if (p.lagrangian.kind != LagrangianKind::quadratic_bilinear)
        throw std::invalid_argument("solve_quadratic: quadratic_bilinear Lagrangian required");
    if (p.lagrangian.flavor != DerivFlavor::riemann_liouville)
        throw std::invalid_argument("solve_quadratic: riemann_liouville flavor required");
    const int n = p.grid.n_nodes;
    if (n < 3) throw std::invalid_argument("solve_quadratic: need at least one interior node");
    QuadraticSystem s = quadratic_system(p);
    const int ni = n - 2;
    Eigen::MatrixXd hii = s.hessian.block(1, 1, ni, ni);
    Eigen::VectorXd rhs =
        -(s.hessian.block(1, 0, ni, 1) * p.X_a + s.hessian.block(1, n - 1, ni, 1) * p.X_b);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(hii);
    const double rc = lu.rcond();
    if (!(rc > 16.0 * kEps))
        throw std::runtime_error(
            "solve_quadratic: interior stationarity system is numerically singular "
            "(reciprocal condition estimate " +
            std::to_string(rc) + ")");
    Eigen::VectorXd mi = lu.solve(rhs);
    std::vector<double> m(static_cast<std::size_t>(n));
    m[0] = p.X_a;
    m[static_cast<std::size_t>(n - 1)] = p.X_b;
    for (int i = 0; i < ni; ++i) m[static_cast<std::size_t>(i + 1)] = mi(i);
    Extremal ex{GriddedFn(p.grid, std::move(m)), 0.0, GriddedFn{}, 0.0};
    ex.J_value = evaluate_J(p, ex.mean);
    ex.el_residual = el_residual(p, ex.mean);
    ex.el_residual_norm = masked_sup(ex.el_residual);
    return ex;
}

StationarityReport quadratic_stationarity(const VariationalProblem& p, const GriddedFn& mean) {
    check_boundary(p, mean, "quadratic_stationarity");
    QuadraticSystem s = quadratic_system(p);
    Eigen::Map<const Eigen::VectorXd> m(mean.values.data(), mean.size());
    Eigen::VectorXd g = s.hessian * m;
    StationarityReport r;
    for (int i = 1; i < mean.size() - 1; ++i) r.grad_inf = std::max(r.grad_inf, std::abs(g(i)));
    r.hessian_row_scale = s.hessian.cwiseAbs().rowwise().sum().maxCoeff();
    const double mscale = std::max(1.0, mean.values.empty() ? 0.0 : sup_abs(mean, 0, mean.size()));
    r.relative = r.grad_inf / (r.hessian_row_scale * mscale);
    return r;
}

namespace {

/// Interior gradient of the discretized functional via the adjoint operators.
Eigen::VectorXd discrete_gradient(const VariationalProblem& p, const GriddedFn& mean,
                                  const Eigen::MatrixXd& a_left, const Eigen::MatrixXd& a_right,
                                  const Eigen::VectorXd& w) {
    const int n = mean.size();
    Eigen::Map<const Eigen::VectorXd> m(mean.values.data(), n);
    Eigen::VectorXd dl = a_left * m;
    Eigen::VectorXd dr = a_right * m;
    Eigen::VectorXd wd2(n), wd3(n), wd4(n);
    for (int i = 0; i < n; ++i) {
        const double t = p.grid.node(i);
        wd2(i) = w(i) * p.lagrangian.d_x(t, m(i), dl(i), dr(i));
        wd3(i) = w(i) * p.lagrangian.d_dl(t, m(i), dl(i), dr(i));
        wd4(i) = w(i) * p.lagrangian.d_dr(t, m(i), dl(i), dr(i));
    }
    Eigen::VectorXd g = wd2 + a_left.transpose() * wd3 + a_right.transpose() * wd4;
    g(0) = 0.0;
    g(n - 1) = 0.0;  // boundary nodes are fixed
    return g;
}

double discrete_J(const VariationalProblem& p, const GriddedFn& mean,
                  const Eigen::MatrixXd& a_left, const Eigen::MatrixXd& a_right,
                  const Eigen::VectorXd& w) {
    const int n = mean.size();
    Eigen::Map<const Eigen::VectorXd> m(mean.values.data(), n);
    Eigen::VectorXd dl = a_left * m;
    Eigen::VectorXd dr = a_right * m;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += w(i) * p.lagrangian.eval(p.grid.node(i), m(i), dl(i), dr(i));
    return acc;
}

}  // namespace

Extremal solve_descent(const VariationalProblem& p, const GriddedFn& init, int steps,
                       double rate) {
    p.validate();
    check_boundary(p, init, "solve_descent");
    if (steps < 0) throw std::invalid_argument("solve_descent: steps must be >= 0");
    if (!(rate > 0.0)) throw std::invalid_argument("solve_descent: rate must be positive");
    const MatrixKind mk = p.lagrangian.flavor == DerivFlavor::riemann_liouville
                              ? MatrixKind::rl_deriv
                              : MatrixKind::caputo_deriv;
    Eigen::MatrixXd a_left = operator_matrix(p.grid, mk, Side::left, p.alpha).entries;
    Eigen::MatrixXd a_right = operator_matrix(p.grid, mk, Side::right, p.alpha).entries;
    Eigen::VectorXd w = trapezoid_weights(p.grid);
    const int n = p.grid.n_nodes;

    GriddedFn m = init;
    double J = discrete_J(p, m, a_left, a_right, w);
    if (!std::isfinite(J)) throw std::invalid_argument("solve_descent: J is not finite at init");
    Eigen::VectorXd g = discrete_gradient(p, m, a_left, a_right, w);
    const double g0 = g.lpNorm<Eigen::Infinity>();
    const double gtol = std::max(1e-14 * (1.0 + std::abs(J)), 1e-12 * g0);

    double step = rate;
    for (int it = 0; it < steps && g.lpNorm<Eigen::Infinity>() > gtol; ++it) {
        const double gnorm2 = g.squaredNorm();
        GriddedFn trial = m;
        double Jt = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (int i = 1; i < n - 1; ++i) trial[i] = m[i] - step * g(i);
            Jt = discrete_J(p, trial, a_left, a_right, w);
            if (std::isfinite(Jt) && Jt <= J - 1e-4 * step * gnorm2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        Eigen::VectorXd gt = discrete_gradient(p, trial, a_left, a_right, w);
        // Barzilai-Borwein step for the next iterate, safeguarded
        Eigen::VectorXd y = gt - g;
        double sy = 0.0, ss = 0.0;
        for (int i = 1; i < n - 1; ++i) {
            const double si = trial[i] - m[i];
            sy += si * y(i);
            ss += si * si;
        }
        if (sy > 0.0 && std::isfinite(ss / sy))
            step = std::min(std::max(ss / sy, 1e-12), 1e12);
        else
            step *= 2.0;
        m = std::move(trial);
        J = Jt;
        g = std::move(gt);
    }

    Extremal ex{std::move(m), 0.0, GriddedFn{}, 0.0};
    ex.J_value = evaluate_J(p, ex.mean);
    ex.el_residual = el_residual(p, ex.mean);
    ex.el_residual_norm = masked_sup(ex.el_residual);
    return ex;
}

C1HNormReport c1h_norm(const Ensemble& e, FracOrder alpha) {
    if (!(alpha.alpha > 0.0 && alpha.alpha < 1.0))
        throw std::invalid_argument("c1h_norm: alpha must lie in (0,1)");
    const int n = e.grid().n_nodes;
    MeanPath mp = mean_path(e);
    GriddedFn rms = mp.mean;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int p = 0; p < e.m_paths(); ++p) acc += e.at(p, i) * e.at(p, i);
        rms[i] = std::sqrt(acc / static_cast<double>(e.m_paths()));
    }
    GriddedFn d1 = rl_deriv(mp.mean, alpha, Side::left);
    GriddedFn d2 = rl_deriv(mp.mean, alpha, Side::right);
    C1HNormReport r;
    r.sup_H_norm = sup_abs(rms, 1, n - 1);
    r.sup_left_deriv = sup_abs(d1, 1, n - 1);
    r.sup_right_deriv = sup_abs(d2, 1, n - 1);
    r.total = r.sup_H_norm + r.sup_left_deriv + r.sup_right_deriv;
    return r;
}

VariationalProblem example2_problem(int n_nodes) {
    VariationalProblem p;
    p.lagrangian = Lagrangian::quadratic_bilinear(1.0);
    p.grid = make_grid(0.01, 0.99, n_nodes);
    p.alpha = FracOrder::of(0.25);
    p.X_a = 1.0;
    p.X_b = 1.0;
    return p;
}

}  // namespace stochfrac
