#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "stochfrac/csv_io.hpp"
#include "stochfrac/ensemble.hpp"
#include "stochfrac/keyval_config.hpp"
#include "stochfrac/operators.hpp"
#include "stochfrac/parallel.hpp"
#include "stochfrac/properties.hpp"
#include "stochfrac/variational.hpp"

namespace sf = stochfrac;

namespace {

void log_config(const std::string& line) { std::cerr << "# " << line << "\n"; }

std::string grid_str(const sf::Grid& g) {
    std::ostringstream os;
    os << "[" << g.a << "," << g.b << "] n_nodes=" << g.n_nodes << " h=" << g.h;
    return os.str();
}

sf::Backend parse_backend(const std::string& name, int N) {
    if (name == "gl") return sf::Backend::gl();
    if (name == "l1") return sf::Backend::l1();
    if (name == "series") return sf::Backend::series(N);
    throw std::invalid_argument("unknown backend '" + name + "', expected gl|l1|series");
}

int cmd_gen(const std::string& process, double theta, double sigma, double x0, double mu,
            const std::string& drift, int paths, double a, double b, int nodes,
            std::uint64_t seed, const std::string& out) {
    sf::ProcessSpec spec;
    spec.kind = sf::process_kind_from_string(process);
    spec.theta = theta;
    spec.sigma = sigma;
    spec.x0 = x0;
    spec.mu = mu;
    spec.drift_id = drift;
    spec.m_paths = paths;
    sf::Grid grid = sf::make_grid(a, b, nodes);
    log_config("gen process=" + process + " sigma=" + std::to_string(sigma) +
               " seed=" + std::to_string(seed) + " grid=" + grid_str(grid) +
               " paths=" + std::to_string(paths) + " threads=" + std::to_string(sf::thread_count()));
    sf::Ensemble e = sf::generate(spec, grid, seed);
    sf::save_csv(e, out);
    return 0;
}

int cmd_frac(const std::string& op, const std::string& side_s, double alpha,
             const std::string& backend_s, int N, const std::string& in, const std::string& out) {
    const sf::Side side = side_s == "left" ? sf::Side::left : sf::Side::right;
    if (side_s != "left" && side_s != "right")
        throw std::invalid_argument("--side must be left or right");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    sf::GriddedFn f = sf::load_fn_csv(in);
    const sf::FracOrder order = sf::FracOrder::of(alpha);
    sf::GriddedFn result;
    std::string backend_used = backend_s;
    if (op == "rl-int") {
        result = sf::rl_integral(f, order, side);
        backend_used = "product-quadrature";
    } else if (op == "rl-deriv") {
        result = sf::rl_deriv(f, order, side, parse_backend(backend_s, N));
    } else if (op == "caputo") {
        result = sf::caputo_deriv(f, order, side);
        backend_used = "l1";
    } else if (op == "series") {
        result = sf::series_deriv(f, alpha, side, N);
        backend_used = "series(N=" + std::to_string(N) + ")";
    } else {
        throw std::invalid_argument("unknown --op '" + op +
                                    "', expected rl-deriv|rl-int|caputo|series");
    }
    log_config("frac op=" + op + " side=" + side_s + " alpha=" + std::to_string(alpha) +
               " backend=" + backend_used + " grid=" + grid_str(f.grid));
    sf::save_fn_csv(result, out);
    return 0;
}

int cmd_stochfrac(const std::string& kind_s, double alpha, const std::string& backend_s, int N,
                  const std::string& in, const std::string& out) {
    const sf::StochOpKind kind = sf::stoch_op_from_string(kind_s);
    sf::Ensemble e = sf::load_ensemble_csv(in);
    sf::StochOpResult r =
        sf::apply(e, kind, sf::FracOrder::of(alpha), parse_backend(backend_s, N));
    log_config("stochfrac kind=" + kind_s + " alpha=" + std::to_string(alpha) + " backend=" +
               sf::to_string(r.backend) + " grid=" + grid_str(e.grid()) +
               " paths=" + std::to_string(e.m_paths()));
    sf::save_columns_csv(out, {"t", "value", "stderr"}, e.grid(),
                         {&r.value.values, &r.standard_error.values});
    return 0;
}

int cmd_verify(const std::string& config, const std::string& out) {
    sf::SuiteConfig cfg = config == "default" ? sf::SuiteConfig::default_config()
                                              : sf::SuiteConfig::load(config);
    log_config("verify config=" + config + " seed=" + std::to_string(cfg.seed) +
               " n_nodes=" + std::to_string(cfg.n_nodes) +
               " m_paths=" + std::to_string(cfg.m_paths) +
               " stride=" + std::to_string(cfg.options.stride));
    auto reports = sf::run_suite(cfg);
    auto series = sf::series_vs_gl(cfg);
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open " + out);
    sf::write_report_csv(os, reports, series);
    std::cout << sf::format_report_table(reports);
    return sf::all_passed(reports) ? 0 : 2;
}

sf::VariationalProblem problem_from_config(const std::string& path, std::string& solver,
                                           int& steps, double& rate) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    auto kvs = sf::parse_keyvalues(is, path);
    std::string lagrangian = "quadratic_bilinear", flavor = "rl", potential = "zero",
                custom = "zero";
    double coeff = 1.0, mass = 1.0, alpha = 0.25, a = 0.01, b = 0.99, xa = 1.0, xb = 1.0;
    int nodes = 99;
    for (const auto& kv : kvs) {
        if (!kv.section.empty() && kv.section != "problem")
            throw std::runtime_error(path + ":" + std::to_string(kv.line) + ": unknown section '" +
                                     kv.section + "'");
        if (kv.key == "lagrangian") lagrangian = kv.value;
        else if (kv.key == "flavor") flavor = kv.value;
        else if (kv.key == "potential") potential = kv.value;
        else if (kv.key == "custom") custom = kv.value;
        else if (kv.key == "coeff") coeff = sf::to_double(kv, path);
        else if (kv.key == "mass") mass = sf::to_double(kv, path);
        else if (kv.key == "alpha") alpha = sf::to_double(kv, path);
        else if (kv.key == "a") a = sf::to_double(kv, path);
        else if (kv.key == "b") b = sf::to_double(kv, path);
        else if (kv.key == "x_a") xa = sf::to_double(kv, path);
        else if (kv.key == "x_b") xb = sf::to_double(kv, path);
        else if (kv.key == "nodes") nodes = sf::to_int(kv, path);
        else if (kv.key == "solver") solver = kv.value;
        else if (kv.key == "steps") steps = sf::to_int(kv, path);
        else if (kv.key == "rate") rate = sf::to_double(kv, path);
        else
            throw std::runtime_error(path + ":" + std::to_string(kv.line) + ": unknown key '" +
                                     kv.key + "'");
    }
    const sf::DerivFlavor fl = flavor == "caputo" ? sf::DerivFlavor::caputo
                                                  : sf::DerivFlavor::riemann_liouville;
    sf::VariationalProblem p;
    if (lagrangian == "quadratic_bilinear")
        p.lagrangian = sf::Lagrangian::quadratic_bilinear(coeff, fl);
    else if (lagrangian == "kinetic_potential")
        p.lagrangian = sf::Lagrangian::kinetic_potential(mass, potential, fl);
    else if (lagrangian == "custom")
        p.lagrangian = sf::Lagrangian::custom(sf::custom_lagrangian(custom), fl);
    else
        throw std::runtime_error(path + ": unknown lagrangian '" + lagrangian + "'");
    p.grid = sf::make_grid(a, b, nodes);
    p.alpha = sf::FracOrder::of(alpha);
    p.X_a = xa;
    p.X_b = xb;
    return p;
}

sf::GriddedFn linear_interpolant(const sf::VariationalProblem& p) {
    return sf::GriddedFn::sample(p.grid, [&](double t) {
        const double s = (t - p.grid.a) / (p.grid.b - p.grid.a);
        return (1.0 - s) * p.X_a + s * p.X_b;
    });
}

int solve_and_write(const sf::VariationalProblem& p, const std::string& solver, int steps,
                    double rate, const std::string& out) {
    log_config("solve solver=" + solver + " alpha=" + std::to_string(p.alpha.alpha) +
               " grid=" + grid_str(p.grid));
    sf::Extremal ex =
        solver == "descent" ? sf::solve_descent(p, linear_interpolant(p), steps, rate)
                            : sf::solve_quadratic(p);
    sf::save_columns_csv(out, {"t", "mean", "el_residual"}, p.grid,
                         {&ex.mean.values, &ex.el_residual.values});
    std::cout << "J = " << sf::csv::format(ex.J_value)
              << "  el_residual_norm = " << sf::csv::format(ex.el_residual_norm) << "\n";
    return 0;
}

int cmd_reproduce_example2(int nodes, const std::string& out) {
    sf::VariationalProblem p = sf::example2_problem(nodes);
    log_config("reproduce-example2 alpha=0.25 grid=" + grid_str(p.grid) +
               " X_a=1 X_b=1 backend=gl");
    sf::Extremal ex = sf::solve_quadratic(p);
    sf::save_columns_csv(out, {"t", "mean", "el_residual"}, p.grid,
                         {&ex.mean.values, &ex.el_residual.values});

    const int n = p.grid.n_nodes;
    double sym = 0.0;
    for (int i = 0; i < n; ++i)
        sym = std::max(sym, std::abs(ex.mean[i] - ex.mean[n - 1 - i]));
    sf::StationarityReport st = sf::quadratic_stationarity(p, ex.mean);
    const double J_lin = sf::evaluate_J(p, linear_interpolant(p));
    sf::Extremal desc = sf::solve_descent(p, linear_interpolant(p), 20000, 1.0);
    double agree = 0.0;
    for (int i = 0; i < n; ++i) agree = std::max(agree, std::abs(ex.mean[i] - desc.mean[i]));
    sf::GriddedFn comp = sf::composed_order_form(p, ex.mean);
    const int cut = std::max(1, (n - 1) / 20);
    std::printf("extremal curve written to %s (%d rows)\n", out.c_str(), n);
    std::printf("boundary values:          %.17g %.17g\n", ex.mean[0], ex.mean[n - 1]);
    std::printf("mirror symmetry sup:      %.3e\n", sym);
    std::printf("stationarity (relative):  %.3e\n", st.relative);
    std::printf("J(extremal):              %.12g\n", ex.J_value);
    std::printf("J(linear interpolant):    %.12g\n", J_lin);
    std::printf("descent agreement sup:    %.3e\n", agree);
    std::printf("EL residual norm:         %.3e\n", ex.el_residual_norm);
    std::printf("composed-order form norm: %.3e (reported, not asserted)\n",
                sf::sup_abs(comp, cut, n - cut));
    const bool ok = ex.mean[0] == p.X_a && ex.mean[n - 1] == p.X_b && sym <= 1e-8 &&
                    st.relative <= 1e-8 && ex.J_value <= J_lin && agree <= 1e-4;
    std::printf("checks: %s\n", ok ? "all passed" : "FAILED");
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic fractional operators, identity verification and variational solvers"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate an ensemble of sample paths");
    std::string g_process = "wiener", g_drift = "zero", g_out = "paths.csv";
    double g_theta = 0.0, g_sigma = 1.0, g_x0 = 0.0, g_mu = 0.0, g_a = 0.0, g_b = 1.0;
    int g_paths = 1000, g_nodes = 1001;
    std::uint64_t g_seed = 42;
    gen->add_option("--process", g_process, "wiener|ou|gbm|det");
    gen->add_option("--theta", g_theta, "OU mean-reversion rate");
    gen->add_option("--sigma", g_sigma, "diffusion");
    gen->add_option("--x0", g_x0, "initial value");
    gen->add_option("--mu", g_mu, "GBM drift rate");
    gen->add_option("--drift", g_drift, "drift id for det: zero|one|linear|quadratic|sqrt|sin");
    gen->add_option("--paths", g_paths, "number of sample paths");
    gen->add_option("--a", g_a, "left endpoint");
    gen->add_option("--b", g_b, "right endpoint");
    gen->add_option("--nodes", g_nodes, "grid nodes");
    gen->add_option("--seed", g_seed, "master RNG seed");
    gen->add_option("--out", g_out, "output ensemble CSV");

    // frac
    auto* frac = app.add_subcommand("frac", "apply a deterministic fractional operator");
    std::string f_op = "rl-deriv", f_side = "left", f_backend = "gl", f_in, f_out = "out.csv";
    double f_alpha = 0.5;
    int f_N = 1;
    frac->add_option("--op", f_op, "rl-deriv|rl-int|caputo|series");
    frac->add_option("--side", f_side, "left|right");
    frac->add_option("--alpha", f_alpha, "fractional order");
    frac->add_option("--backend", f_backend, "gl|l1|series");
    frac->add_option("--N", f_N, "series truncation (0..2)");
    frac->add_option("--in", f_in, "input t,value CSV")->required();
    frac->add_option("--out", f_out, "output CSV");

    // stochfrac
    auto* stoch = app.add_subcommand("stochfrac", "apply a stochastic fractional operator (d1..d6)");
    std::string s_kind = "d1", s_backend = "gl", s_in, s_out = "result.csv";
    double s_alpha = 0.5;
    int s_N = 1;
    stoch->add_option("--kind", s_kind, "d1..d6");
    stoch->add_option("--alpha", s_alpha, "fractional order");
    stoch->add_option("--backend", s_backend, "gl|l1|series");
    stoch->add_option("--N", s_N, "series truncation");
    stoch->add_option("--in", s_in, "input ensemble CSV")->required();
    stoch->add_option("--out", s_out, "output t,value,stderr CSV");

    // verify
    auto* verify = app.add_subcommand("verify", "run the identity verification suite");
    std::string v_config = "default", v_out = "report.csv";
    verify->add_option("--config", v_config, "suite config file or 'default'");
    verify->add_option("--out", v_out, "report CSV");

    // solve
    auto* solve = app.add_subcommand("solve", "solve a variational problem");
    std::string so_problem, so_config, so_out = "extremal.csv", so_solver = "quadratic";
    int so_steps = 20000;
    double so_rate = 1.0;
    solve->add_option("--problem", so_problem, "preset name (example2)");
    solve->add_option("--config", so_config, "problem config file");
    solve->add_option("--out", so_out, "output t,mean,el_residual CSV");
    solve->add_option("--solver", so_solver, "quadratic|descent");
    solve->add_option("--steps", so_steps, "descent iterations");
    solve->add_option("--rate", so_rate, "descent initial step");

    // reproduce-example2
    auto* rep = app.add_subcommand("reproduce-example2",
                                   "solve the worked bilinear problem and report its properties");
    int r_nodes = 99;
    std::string r_out = "curve.csv";
    rep->add_option("--nodes", r_nodes, "grid nodes");
    rep->add_option("--out", r_out, "output curve CSV");

    try {
        app.parse(argc, argv);
        if (gen->parsed())
            return cmd_gen(g_process, g_theta, g_sigma, g_x0, g_mu, g_drift, g_paths, g_a, g_b,
                           g_nodes, g_seed, g_out);
        if (frac->parsed()) return cmd_frac(f_op, f_side, f_alpha, f_backend, f_N, f_in, f_out);
        if (stoch->parsed()) return cmd_stochfrac(s_kind, s_alpha, s_backend, s_N, s_in, s_out);
        if (verify->parsed()) return cmd_verify(v_config, v_out);
        if (solve->parsed()) {
            if (!so_config.empty()) {
                sf::VariationalProblem p = problem_from_config(so_config, so_solver, so_steps,
                                                               so_rate);
                return solve_and_write(p, so_solver, so_steps, so_rate, so_out);
            }
            if (so_problem == "example2" || so_problem.empty())
                return solve_and_write(sf::example2_problem(), so_solver, so_steps, so_rate,
                                       so_out);
            throw std::invalid_argument("unknown preset '" + so_problem + "'");
        }
        if (rep->parsed()) return cmd_reproduce_example2(r_nodes, r_out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
