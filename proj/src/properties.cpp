#include "stochfrac/properties.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "stochfrac/csv_io.hpp"
#include "stochfrac/keyval_config.hpp"

namespace stochfrac {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMinNodes = 9;

struct Eval {
    double residual = 0.0;
    double se3 = 0.0;    // 3x propagated standard error
    double scale = 0.0;  // magnitude of the compared quantities
};

struct Range {
    int lo, hi;  // [lo, hi)
};

Range mask(int n, double frac, bool left, bool right) {
    int cut = static_cast<int>(std::ceil(frac * static_cast<double>(n - 1)));
    cut = std::max(1, cut);
    Range r{left ? cut : 0, right ? n - cut : n};
    if (r.lo >= r.hi) r = {0, n};
    return r;
}

double trapz_prod(const GriddedFn& u, const GriddedFn& v) {
    GriddedFn p = u;
    for (int i = 0; i < p.size(); ++i) p[i] = u[i] * v[i];
    return trapezoid(p);
}

GriddedFn abs_fn(const GriddedFn& f) {
    GriddedFn g = f;
    for (auto& v : g.values) v = std::abs(v);
    return g;
}

// -------- single-resolution evaluations --------

Eval eval_semigroup(const MeanPath& m, double alpha, double beta, Side side, double frac) {
    const auto oa = FracOrder::of(alpha);
    const auto ob = FracOrder::of(beta);
    const auto oab = FracOrder::of(alpha + beta);
    GriddedFn inner = rl_integral(m.mean, ob, side);
    GriddedFn lhs = rl_integral(inner, oa, side);
    GriddedFn rhs = rl_integral(m.mean, oab, side);
    Range r = mask(lhs.size(), frac, true, true);
    GriddedFn se_inner = rl_integral_abs(m.std_error, ob, side);
    GriddedFn se_lhs = rl_integral_abs(se_inner, oa, side);
    GriddedFn se_rhs = rl_integral_abs(m.std_error, oab, side);
    Eval e;
    e.residual = sup_diff(lhs, rhs, r.lo, r.hi);
    e.se3 = 3.0 * (sup_abs(se_lhs, r.lo, r.hi) + sup_abs(se_rhs, r.lo, r.hi));
    e.scale = std::max(sup_abs(lhs, r.lo, r.hi), sup_abs(rhs, r.lo, r.hi));
    return e;
}

Eval eval_left_inverse(const MeanPath& m, double alpha, InverseFlavor flavor, Side side,
                       double frac) {
    const auto o = FracOrder::of(alpha);
    GriddedFn integ = rl_integral(m.mean, o, side);
    GriddedFn outer = flavor == InverseFlavor::rl ? rl_deriv(integ, o, side)
                                                  : caputo_deriv(integ, o, side);
    GriddedFn se_integ = rl_integral_abs(m.std_error, o, side);
    GriddedFn se_outer = flavor == InverseFlavor::rl ? rl_deriv_abs(se_integ, o, side)
                                                     : caputo_deriv_abs(se_integ, o, side);
    Range r = mask(outer.size(), frac, side == Side::left, side == Side::right);
    Eval e;
    e.residual = sup_diff(outer, m.mean, r.lo, r.hi);
    e.se3 = 3.0 * (sup_abs(se_outer, r.lo, r.hi) + sup_abs(m.std_error, r.lo, r.hi));
    e.scale = std::max(sup_abs(outer, r.lo, r.hi), sup_abs(m.mean, r.lo, r.hi));
    return e;
}

Eval eval_ibp(const MeanPath& mx, const MeanPath& my, const Ensemble* ex, double alpha,
              IbpForm form, double* unfactored_gap) {
    const int n = mx.mean.size();
    const auto o = FracOrder::of(alpha);
    GriddedFn gy{}, gx{};          // factor applied to Y's mean / X's mean
    GriddedFn se_gy{}, se_gx{};    // |weight|-propagated bands of those factors
    double bracket = 0.0, bracket_se = 0.0, bracket_scale = 0.0;
    switch (form) {
        case IbpForm::integral:
            gy = rl_integral(my.mean, o, Side::left);
            gx = rl_integral(mx.mean, o, Side::right);
            se_gy = rl_integral_abs(my.std_error, o, Side::left);
            se_gx = rl_integral_abs(mx.std_error, o, Side::right);
            break;
        case IbpForm::rl:
            gy = rl_deriv(my.mean, o, Side::left);
            gx = rl_deriv(mx.mean, o, Side::right);
            se_gy = rl_deriv_abs(my.std_error, o, Side::left);
            se_gx = rl_deriv_abs(mx.std_error, o, Side::right);
            break;
        case IbpForm::caputo_left: {
            gy = caputo_deriv(my.mean, o, Side::left);
            gx = rl_deriv(mx.mean, o, Side::right);
            se_gy = caputo_deriv_abs(my.std_error, o, Side::left);
            se_gx = rl_deriv_abs(mx.std_error, o, Side::right);
            const auto o1 = FracOrder::of(1.0 - alpha);
            GriddedFn iX = rl_integral(mx.mean, o1, Side::right);
            GriddedFn se_iX = rl_integral_abs(mx.std_error, o1, Side::right);
            bracket = iX[n - 1] * my.mean[n - 1] - iX[0] * my.mean[0];
            bracket_se = std::abs(se_iX[n - 1] * my.mean[n - 1]) +
                         std::abs(iX[n - 1]) * my.std_error[n - 1] +
                         std::abs(se_iX[0] * my.mean[0]) + std::abs(iX[0]) * my.std_error[0];
            bracket_scale = std::abs(iX[n - 1] * my.mean[n - 1]) + std::abs(iX[0] * my.mean[0]);
            break;
        }
        case IbpForm::caputo_right: {
            gy = caputo_deriv(my.mean, o, Side::right);
            gx = rl_deriv(mx.mean, o, Side::left);
            se_gy = caputo_deriv_abs(my.std_error, o, Side::right);
            se_gx = rl_deriv_abs(mx.std_error, o, Side::left);
            const auto o1 = FracOrder::of(1.0 - alpha);
            GriddedFn iX = rl_integral(mx.mean, o1, Side::left);
            GriddedFn se_iX = rl_integral_abs(mx.std_error, o1, Side::left);
            bracket = -(iX[n - 1] * my.mean[n - 1] - iX[0] * my.mean[0]);
            bracket_se = std::abs(se_iX[n - 1] * my.mean[n - 1]) +
                         std::abs(iX[n - 1]) * my.std_error[n - 1] +
                         std::abs(se_iX[0] * my.mean[0]) + std::abs(iX[0]) * my.std_error[0];
            bracket_scale = std::abs(iX[n - 1] * my.mean[n - 1]) + std::abs(iX[0] * my.mean[0]);
            break;
        }
    }
    const double lhs = trapz_prod(mx.mean, gy);
    const double rhs = trapz_prod(my.mean, gx) + bracket;
    Eval e;
    e.residual = std::abs(lhs - rhs);
    const double se_lhs = trapz_prod(mx.std_error, abs_fn(gy)) + trapz_prod(abs_fn(mx.mean), se_gy);
    const double se_rhs = trapz_prod(my.std_error, abs_fn(gx)) + trapz_prod(abs_fn(my.mean), se_gx);
    e.se3 = 3.0 * (se_lhs + se_rhs + bracket_se);
    e.scale = std::max({std::abs(lhs), std::abs(rhs), bracket_scale});
    if (unfactored_gap != nullptr && ex != nullptr) {
        // per-path-product estimator of the LHS; coincides with the factored
        // value up to rounding because the mean and the integral are linear
        double acc = 0.0;
        GriddedFn tmp = gy;
        for (int p = 0; p < ex->m_paths(); ++p) {
            auto path = ex->path(p);
            for (int i = 0; i < n; ++i)
                tmp[i] = path[static_cast<std::size_t>(i)] * gy[i];
            acc += trapezoid(tmp);
        }
        acc /= static_cast<double>(ex->m_paths());
        *unfactored_gap = std::abs(acc - lhs);
    }
    return e;
}

// -------- two-resolution calibration --------

int usable_stride(int n_nodes, int preferred) {
    for (int s = preferred; s >= 2; --s) {
        if ((n_nodes - 1) % s != 0) continue;
        if ((n_nodes - 1) / s + 1 >= kMinNodes) return s;
    }
    return 0;
}

IdentityReport skipped_report(IdentityId id, double alpha, int n_nodes, const std::string& why) {
    IdentityReport r;
    r.id = id;
    r.alpha = alpha;
    r.n_nodes = n_nodes;
    r.skipped = true;
    r.passed = true;  // skipped is not a failure
    r.note = why;
    return r;
}

void finish(IdentityReport& r, const Eval& fine, const Eval& coarse) {
    r.residual = fine.residual;
    r.tolerance = 3.0 * std::abs(coarse.residual - fine.residual) + fine.se3 +
                  100.0 * kEps * std::max(1.0, fine.scale);
    r.passed = r.residual <= r.tolerance;
}

MeanPath decimated(const MeanPath& m, int stride) {
    return {decimate(m.mean, stride), decimate(m.std_error, stride)};
}

}  // namespace

std::string to_string(IdentityId id) {
    switch (id) {
        case IdentityId::prop3_semigroup_left: return "prop3_semigroup_left";
        case IdentityId::prop3_semigroup_right: return "prop3_semigroup_right";
        case IdentityId::prop3_left_inverse: return "prop3_left_inverse";
        case IdentityId::prop4_caputo_left: return "prop4_caputo_left";
        case IdentityId::prop4_caputo_right: return "prop4_caputo_right";
        case IdentityId::ibp_integral: return "ibp_integral";
        case IdentityId::ibp_rl: return "ibp_rl";
        case IdentityId::ibp_caputo_left: return "ibp_caputo_left";
        case IdentityId::ibp_caputo_right: return "ibp_caputo_right";
    }
    return "?";
}

IdentityReport check_semigroup(const Ensemble& e, double alpha, double beta, Side side,
                               const CheckOptions& opt) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("check_semigroup: alpha and beta must be positive");
    const IdentityId id = side == Side::left ? IdentityId::prop3_semigroup_left
                                             : IdentityId::prop3_semigroup_right;
    const int n = e.grid().n_nodes;
    if (n < kMinNodes) return skipped_report(id, alpha, n, "skipped-insufficient-grid");
    const int stride = usable_stride(n, opt.stride);
    if (stride == 0) return skipped_report(id, alpha, n, "skipped-grid-not-decimatable");
    MeanPath m = mean_path(e);
    IdentityReport r;
    r.id = id;
    r.alpha = alpha;
    r.n_nodes = n;
    finish(r, eval_semigroup(m, alpha, beta, side, opt.mask_fraction),
           eval_semigroup(decimated(m, stride), alpha, beta, side, opt.mask_fraction));
    return r;
}

IdentityReport check_left_inverse(const Ensemble& e, double alpha, InverseFlavor flavor,
                                  Side side, const CheckOptions& opt) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("check_left_inverse: alpha must lie in (0,1)");
    IdentityId id = IdentityId::prop3_left_inverse;
    if (flavor == InverseFlavor::caputo)
        id = side == Side::left ? IdentityId::prop4_caputo_left : IdentityId::prop4_caputo_right;
    const int n = e.grid().n_nodes;
    if (n < kMinNodes) return skipped_report(id, alpha, n, "skipped-insufficient-grid");
    const int stride = usable_stride(n, opt.stride);
    if (stride == 0) return skipped_report(id, alpha, n, "skipped-grid-not-decimatable");
    MeanPath m = mean_path(e);
    IdentityReport r;
    r.id = id;
    r.alpha = alpha;
    r.n_nodes = n;
    finish(r, eval_left_inverse(m, alpha, flavor, side, opt.mask_fraction),
           eval_left_inverse(decimated(m, stride), alpha, flavor, side, opt.mask_fraction));
    return r;
}

IdentityReport check_ibp(const Ensemble& eX, const Ensemble& eY, double alpha, IbpForm form,
                         const CheckOptions& opt) {
    if (!eX.grid().same_as(eY.grid())) throw std::invalid_argument("check_ibp: grid mismatch");
    if (form == IbpForm::integral) {
        if (!(alpha > 0.0)) throw std::invalid_argument("check_ibp: alpha must be positive");
    } else if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("check_ibp: alpha must lie in (0,1) for derivative forms");
    }
    IdentityId id = IdentityId::ibp_integral;
    if (form == IbpForm::rl) id = IdentityId::ibp_rl;
    if (form == IbpForm::caputo_left) id = IdentityId::ibp_caputo_left;
    if (form == IbpForm::caputo_right) id = IdentityId::ibp_caputo_right;
    const int n = eX.grid().n_nodes;
    if (n < kMinNodes) return skipped_report(id, alpha, n, "skipped-insufficient-grid");
    const int stride = usable_stride(n, opt.stride);
    if (stride == 0) return skipped_report(id, alpha, n, "skipped-grid-not-decimatable");
    MeanPath mx = mean_path(eX);
    MeanPath my = mean_path(eY);
    IdentityReport r;
    r.id = id;
    r.alpha = alpha;
    r.n_nodes = n;
    double gap = 0.0;
    Eval fine = eval_ibp(mx, my, &eX, alpha, form, &gap);
    Eval coarse =
        eval_ibp(decimated(mx, stride), decimated(my, stride), nullptr, alpha, form, nullptr);
    finish(r, fine, coarse);
    r.unfactored_gap = gap;
    return r;
}

SuiteConfig SuiteConfig::default_config() {
    SuiteConfig c;
    c.alphas = {0.25, 0.5, 0.75};
    c.n_nodes = 1001;
    c.m_paths = 10000;
    c.seed = 42;
    c.options.stride = 8;
    SuiteProcess wiener;
    wiener.label = "wiener";
    wiener.spec.kind = ProcessKind::wiener;
    wiener.spec.sigma = 1.0;
    wiener.spec.x0 = 0.0;
    SuiteProcess ou;
    ou.label = "ou";
    ou.spec.kind = ProcessKind::ornstein_uhlenbeck;
    ou.spec.theta = 1.0;
    ou.spec.sigma = 0.2;
    ou.spec.x0 = 1.0;
    SuiteProcess det;
    det.label = "det_quadratic";
    det.spec.kind = ProcessKind::deterministic_plus_noise;
    det.spec.sigma = 0.0;
    det.spec.drift_id = "quadratic";
    det.partner_drift = "linear";
    c.processes = {wiener, ou, det};
    return c;
}

SuiteConfig SuiteConfig::parse(std::istream& is, const std::string& name) {
    SuiteConfig c;
    c.alphas.clear();
    c.processes.clear();
    auto kvs = parse_keyvalues(is, name);
    for (const auto& kv : kvs) {
        if (kv.section.empty() || kv.section == "suite") {
            if (kv.key == "alphas") {
                for (const auto& s : split_list(kv.value)) {
                    try {
                        c.alphas.push_back(std::stod(s));
                    } catch (...) {
                        throw std::runtime_error(name + ":" + std::to_string(kv.line) +
                                                 ": bad alpha '" + s + "'");
                    }
                }
            } else if (kv.key == "n_nodes") {
                c.n_nodes = to_int(kv, name);
            } else if (kv.key == "m_paths") {
                c.m_paths = to_int(kv, name);
            } else if (kv.key == "seed") {
                c.seed = static_cast<std::uint64_t>(to_int(kv, name));
            } else if (kv.key == "stride") {
                c.options.stride = to_int(kv, name);
            } else if (kv.key == "mask_fraction") {
                c.options.mask_fraction = to_double(kv, name);
            } else {
                throw std::runtime_error(name + ":" + std::to_string(kv.line) +
                                         ": unknown suite key '" + kv.key + "'");
            }
        } else if (kv.section.rfind("process ", 0) == 0) {
            const std::string label = kv.section.substr(8);
            SuiteProcess* proc = nullptr;
            for (auto& p : c.processes)
                if (p.label == label) proc = &p;
            if (proc == nullptr) {
                c.processes.push_back(SuiteProcess{label, ProcessSpec{}, ""});
                proc = &c.processes.back();
                proc->spec.sigma = 0.0;
            }
            if (kv.key == "kind")
                proc->spec.kind = process_kind_from_string(kv.value);
            else if (kv.key == "theta")
                proc->spec.theta = to_double(kv, name);
            else if (kv.key == "sigma")
                proc->spec.sigma = to_double(kv, name);
            else if (kv.key == "x0")
                proc->spec.x0 = to_double(kv, name);
            else if (kv.key == "mu")
                proc->spec.mu = to_double(kv, name);
            else if (kv.key == "drift")
                proc->spec.drift_id = kv.value;
            else if (kv.key == "partner_drift")
                proc->partner_drift = kv.value;
            else
                throw std::runtime_error(name + ":" + std::to_string(kv.line) +
                                         ": unknown process key '" + kv.key + "'");
        } else if (kv.section.rfind("check ", 0) == 0) {
            const std::string label = kv.section.substr(6);
            if (kv.key == "n_nodes")
                c.n_nodes_override[label] = to_int(kv, name);
            else
                throw std::runtime_error(name + ":" + std::to_string(kv.line) +
                                         ": unknown check key '" + kv.key + "'");
        } else {
            throw std::runtime_error(name + ":" + std::to_string(kv.line) +
                                     ": unknown section '" + kv.section + "'");
        }
    }
    return c;
}

SuiteConfig SuiteConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("SuiteConfig: cannot open " + path);
    return parse(is, path);
}

namespace {

struct ProcessEnsembles {
    Ensemble x;
    Ensemble y;  // ibp partner
};

ProcessEnsembles make_ensembles(const SuiteProcess& p, const Grid& g, std::uint64_t seed,
                                int m_paths) {
    ProcessSpec spec = p.spec;
    if (spec.kind != ProcessKind::deterministic_plus_noise || spec.sigma > 0.0)
        spec.m_paths = m_paths;
    Ensemble x = generate(spec, g, seed);
    if (!p.partner_drift.empty()) {
        return {std::move(x),
                deterministic_ensemble(GriddedFn::sample(g, drift_function(p.partner_drift)))};
    }
    Ensemble y = generate(spec, g, seed + 7919);
    return {std::move(x), std::move(y)};
}

}  // namespace

std::vector<IdentityReport> run_suite(const SuiteConfig& config) {
    std::vector<IdentityReport> reports;
    auto node_count = [&](const char* label) {
        auto it = config.n_nodes_override.find(label);
        return it == config.n_nodes_override.end() ? config.n_nodes : it->second;
    };
    for (const auto& proc : config.processes) {
        // ensembles cached per distinct grid size
        std::map<int, ProcessEnsembles> cache;
        auto ensembles = [&](int n) -> ProcessEnsembles& {
            auto it = cache.find(n);
            if (it == cache.end()) {
                Grid g = make_grid(0.0, 1.0, n);
                it = cache.emplace(n, make_ensembles(proc, g, config.seed, config.m_paths)).first;
            }
            return it->second;
        };
        for (double alpha : config.alphas) {
            auto push = [&](IdentityReport r) {
                r.process = proc.label;
                reports.push_back(std::move(r));
            };
            {
                auto& pe = ensembles(node_count("prop3_semigroup_left"));
                push(check_semigroup(pe.x, alpha, alpha, Side::left, config.options));
            }
            {
                auto& pe = ensembles(node_count("prop3_semigroup_right"));
                push(check_semigroup(pe.x, alpha, alpha, Side::right, config.options));
            }
            {
                auto& pe = ensembles(node_count("prop3_left_inverse"));
                push(check_left_inverse(pe.x, alpha, InverseFlavor::rl, Side::left,
                                        config.options));
            }
            {
                auto& pe = ensembles(node_count("prop4_caputo_left"));
                push(check_left_inverse(pe.x, alpha, InverseFlavor::caputo, Side::left,
                                        config.options));
            }
            {
                auto& pe = ensembles(node_count("prop4_caputo_right"));
                push(check_left_inverse(pe.x, alpha, InverseFlavor::caputo, Side::right,
                                        config.options));
            }
            {
                auto& pe = ensembles(node_count("ibp_integral"));
                push(check_ibp(pe.x, pe.y, alpha, IbpForm::integral, config.options));
            }
            {
                auto& pe = ensembles(node_count("ibp_rl"));
                push(check_ibp(pe.x, pe.y, alpha, IbpForm::rl, config.options));
            }
            {
                auto& pe = ensembles(node_count("ibp_caputo_left"));
                push(check_ibp(pe.x, pe.y, alpha, IbpForm::caputo_left, config.options));
            }
            {
                auto& pe = ensembles(node_count("ibp_caputo_right"));
                push(check_ibp(pe.x, pe.y, alpha, IbpForm::caputo_right, config.options));
            }
        }
    }
    return reports;
}

std::vector<SeriesComparisonRow> series_vs_gl(const SuiteConfig& config) {
    std::vector<SeriesComparisonRow> rows;
    const int n = config.n_nodes;
    if (n < 9) return rows;
    Grid g = make_grid(0.0, 1.0, n);
    const std::vector<std::string> fns = {"linear", "quadratic", "sin"};
    for (const auto& fname : fns) {
        GriddedFn f = GriddedFn::sample(g, drift_function(fname));
        for (double alpha : config.alphas) {
            if (!(alpha > 0.0 && alpha < 1.0)) continue;
            const auto o = FracOrder::of(alpha);
            GriddedFn gl = rl_deriv(f, o, Side::left);
            for (int N = 0; N <= 1; ++N) {
                GriddedFn ser = series_deriv(f, alpha, Side::left, N);
                Range r = mask(n, config.options.mask_fraction, true, true);
                rows.push_back({N, alpha, fname, n, sup_diff(gl, ser, r.lo, r.hi)});
            }
        }
    }
    return rows;
}

void write_report_csv(std::ostream& os, const std::vector<IdentityReport>& reports,
                      const std::vector<SeriesComparisonRow>& series) {
    os << "identity,alpha,process,n_nodes,residual,tolerance,passed\n";
    for (const auto& r : reports) {
        os << to_string(r.id) << ',' << csv::format(r.alpha) << ',' << r.process << ','
           << r.n_nodes << ',' << csv::format(r.residual) << ',' << csv::format(r.tolerance)
           << ',' << (r.skipped ? "skipped" : (r.passed ? "true" : "false")) << "\n";
    }
    for (const auto& s : series) {
        os << "series_vs_gl_N" << s.N << ',' << csv::format(s.alpha) << ',' << s.process << ','
           << s.n_nodes << ',' << csv::format(s.discrepancy) << ",inf,info\n";
    }
}

std::string format_report_table(const std::vector<IdentityReport>& reports) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-24s %-6s %-14s %8s %12s %12s %s\n", "identity", "alpha",
                  "process", "n_nodes", "residual", "tolerance", "status");
    os << buf;
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%-24s %-6.3g %-14s %8d %12.4e %12.4e %s\n",
                      to_string(r.id).c_str(), r.alpha, r.process.c_str(), r.n_nodes, r.residual,
                      r.tolerance, r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL"));
        os << buf;
        if (r.skipped && !r.note.empty()) os << "    (" << r.note << ")\n";
    }
    return os.str();
}

bool all_passed(const std::vector<IdentityReport>& reports) {
    for (const auto& r : reports)
        if (!r.passed) return false;
    return true;
}

}  // namespace stochfrac
