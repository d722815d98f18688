#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stochfrac/ensemble.hpp"
#include "stochfrac/fracnum.hpp"
#include "stochfrac/operators.hpp"
#include "stochfrac/properties.hpp"
#include "stochfrac/variational.hpp"

namespace py = pybind11;
using namespace stochfrac;

namespace {

Backend backend_from(const std::string& name, int N) {
    if (name == "gl") return Backend::gl();
    if (name == "l1") return Backend::l1();
    if (name == "series") return Backend::series(N);
    throw std::invalid_argument("unknown backend '" + name + "'");
}

Side side_from(const std::string& s) {
    if (s == "left") return Side::left;
    if (s == "right") return Side::right;
    throw std::invalid_argument("side must be 'left' or 'right'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "stochastic fractional operators, identity checks and variational solvers";

    py::class_<Grid>(m, "Grid")
        .def_readonly("a", &Grid::a)
        .def_readonly("b", &Grid::b)
        .def_readonly("n_nodes", &Grid::n_nodes)
        .def_readonly("h", &Grid::h)
        .def("node", &Grid::node)
        .def("nodes", &Grid::nodes)
        .def("__repr__", [](const Grid& g) {
            std::ostringstream os;
            os << "Grid([" << g.a << ", " << g.b << "], n_nodes=" << g.n_nodes << ")";
            return os.str();
        });
    m.def("make_grid", &make_grid, py::arg("a"), py::arg("b"), py::arg("n_nodes"));

    py::class_<GriddedFn>(m, "GriddedFn")
        .def(py::init<Grid, std::vector<double>>())
        .def_readonly("grid", &GriddedFn::grid)
        .def_readonly("values", &GriddedFn::values)
        .def("__len__", &GriddedFn::size)
        .def("__getitem__", [](const GriddedFn& f, int i) {
            if (i < 0 || i >= f.size()) throw py::index_error();
            return f[i];
        });
    m.def("sample", [](const Grid& g, const std::function<double(double)>& f) {
        return GriddedFn::sample(g, f);
    });
    m.def("constant", &GriddedFn::constant);

    m.def("trapezoid", &trapezoid);
    m.def("finite_diff", &finite_diff, py::arg("f"), py::arg("order"));

    py::class_<FracOrder>(m, "FracOrder")
        .def_readonly("alpha", &FracOrder::alpha)
        .def_readonly("n", &FracOrder::n);
    m.def("frac_order", &FracOrder::of, py::arg("alpha"));

    m.def(
        "rl_integral",
        [](const GriddedFn& f, double alpha, const std::string& side) {
            return rl_integral(f, FracOrder::of(alpha), side_from(side));
        },
        py::arg("f"), py::arg("alpha"), py::arg("side") = "left");
    m.def(
        "rl_deriv",
        [](const GriddedFn& f, double alpha, const std::string& side, const std::string& backend,
           int N) {
            return rl_deriv(f, FracOrder::of(alpha), side_from(side), backend_from(backend, N));
        },
        py::arg("f"), py::arg("alpha"), py::arg("side") = "left", py::arg("backend") = "gl",
        py::arg("N") = 1);
    m.def(
        "caputo_deriv",
        [](const GriddedFn& f, double alpha, const std::string& side) {
            return caputo_deriv(f, FracOrder::of(alpha), side_from(side));
        },
        py::arg("f"), py::arg("alpha"), py::arg("side") = "left");
    m.def(
        "series_deriv",
        [](const GriddedFn& f, double alpha, const std::string& side, int N) {
            return series_deriv(f, alpha, side_from(side), N);
        },
        py::arg("f"), py::arg("alpha"), py::arg("side") = "left", py::arg("N") = 1);
    m.def(
        "operator_entries",
        [](const Grid& g, const std::string& kind, const std::string& side, double alpha) {
            MatrixKind k = MatrixKind::rl_deriv;
            if (kind == "rl_integral") k = MatrixKind::rl_integral;
            else if (kind == "caputo_deriv") k = MatrixKind::caputo_deriv;
            else if (kind != "rl_deriv") throw std::invalid_argument("unknown matrix kind");
            OperatorMatrix om = operator_matrix(g, k, side_from(side), FracOrder::of(alpha));
            std::vector<std::vector<double>> rows(static_cast<std::size_t>(g.n_nodes));
            for (int i = 0; i < g.n_nodes; ++i) {
                rows[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(g.n_nodes));
                for (int j = 0; j < g.n_nodes; ++j)
                    rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                        om.entries(i, j);
            }
            return rows;
        },
        py::arg("grid"), py::arg("kind"), py::arg("side"), py::arg("alpha"));

    py::class_<ProcessSpec>(m, "ProcessSpec")
        .def(py::init([](const std::string& kind, double theta, double sigma, double x0,
                         double mu, const std::string& drift, int paths) {
                 ProcessSpec s;
                 s.kind = process_kind_from_string(kind);
                 s.theta = theta;
                 s.sigma = sigma;
                 s.x0 = x0;
                 s.mu = mu;
                 s.drift_id = drift;
                 s.m_paths = paths;
                 s.validate();
                 return s;
             }),
             py::arg("kind"), py::arg("theta") = 0.0, py::arg("sigma") = 1.0,
             py::arg("x0") = 0.0, py::arg("mu") = 0.0, py::arg("drift") = "zero",
             py::arg("paths") = 1);

    py::class_<Ensemble>(m, "Ensemble")
        .def_property_readonly("grid", &Ensemble::grid)
        .def_property_readonly("m_paths", &Ensemble::m_paths)
        .def("path", [](const Ensemble& e, int p) {
            if (p < 0 || p >= e.m_paths()) throw py::index_error();
            auto s = e.path(p);
            return std::vector<double>(s.begin(), s.end());
        });
    m.def("generate", &generate, py::arg("spec"), py::arg("grid"), py::arg("seed"));
    m.def("deterministic_ensemble", &deterministic_ensemble, py::arg("f"),
          py::arg("m_paths") = 1);
    m.def("save_ensemble_csv",
          static_cast<void (*)(const Ensemble&, const std::string&)>(&save_csv));
    m.def("load_ensemble_csv",
          static_cast<Ensemble (*)(const std::string&)>(&load_ensemble_csv));

    py::class_<MeanPath>(m, "MeanPath")
        .def_readonly("mean", &MeanPath::mean)
        .def_readonly("std_error", &MeanPath::std_error);
    m.def("mean_path", &mean_path);

    py::class_<StochOpResult>(m, "StochOpResult")
        .def_readonly("value", &StochOpResult::value)
        .def_readonly("mean_used", &StochOpResult::mean_used)
        .def_readonly("standard_error", &StochOpResult::standard_error);
    m.def(
        "apply",
        [](const Ensemble& e, const std::string& kind, double alpha, const std::string& backend,
           int N) {
            return apply(e, stoch_op_from_string(kind), FracOrder::of(alpha),
                         backend_from(backend, N));
        },
        py::arg("ensemble"), py::arg("kind"), py::arg("alpha"), py::arg("backend") = "gl",
        py::arg("N") = 1);

    py::class_<Prop1Bound>(m, "Prop1Bound")
        .def_readonly("bound", &Prop1Bound::bound)
        .def_readonly("sup_abs", &Prop1Bound::sup_abs)
        .def_readonly("k", &Prop1Bound::k)
        .def_readonly("mean_l1", &Prop1Bound::mean_l1);
    m.def("prop1_bound", [](const Ensemble& e, double alpha) {
        return prop1_bound(e, FracOrder::of(alpha));
    });

    py::class_<IdentityReport>(m, "IdentityReport")
        .def_property_readonly("identity",
                               [](const IdentityReport& r) { return to_string(r.id); })
        .def_readonly("alpha", &IdentityReport::alpha)
        .def_readonly("process", &IdentityReport::process)
        .def_readonly("n_nodes", &IdentityReport::n_nodes)
        .def_readonly("residual", &IdentityReport::residual)
        .def_readonly("tolerance", &IdentityReport::tolerance)
        .def_readonly("passed", &IdentityReport::passed)
        .def_readonly("skipped", &IdentityReport::skipped)
        .def_readonly("unfactored_gap", &IdentityReport::unfactored_gap);
    m.def(
        "check_semigroup",
        [](const Ensemble& e, double alpha, double beta, const std::string& side) {
            return check_semigroup(e, alpha, beta, side_from(side));
        },
        py::arg("ensemble"), py::arg("alpha"), py::arg("beta"), py::arg("side") = "left");
    m.def(
        "check_left_inverse",
        [](const Ensemble& e, double alpha, const std::string& flavor, const std::string& side) {
            const InverseFlavor fl = flavor == "caputo" ? InverseFlavor::caputo : InverseFlavor::rl;
            return check_left_inverse(e, alpha, fl, side_from(side));
        },
        py::arg("ensemble"), py::arg("alpha"), py::arg("flavor") = "rl", py::arg("side") = "left");
    m.def(
        "check_ibp",
        [](const Ensemble& x, const Ensemble& y, double alpha, const std::string& form) {
            IbpForm f = IbpForm::integral;
            if (form == "rl") f = IbpForm::rl;
            else if (form == "caputo_left") f = IbpForm::caputo_left;
            else if (form == "caputo_right") f = IbpForm::caputo_right;
            else if (form != "integral") throw std::invalid_argument("unknown ibp form");
            return check_ibp(x, y, alpha, f);
        },
        py::arg("x"), py::arg("y"), py::arg("alpha"), py::arg("form") = "integral");
    m.def("run_default_suite", []() { return run_suite(SuiteConfig::default_config()); });
    m.def("run_suite_file", [](const std::string& path) {
        return run_suite(SuiteConfig::load(path));
    });

    py::class_<VariationalProblem>(m, "VariationalProblem")
        .def_readonly("grid", &VariationalProblem::grid)
        .def_readonly("X_a", &VariationalProblem::X_a)
        .def_readonly("X_b", &VariationalProblem::X_b);
    m.def("example2_problem", &example2_problem, py::arg("n_nodes") = 99);
    m.def(
        "quadratic_problem",
        [](double coeff, double a, double b, int nodes, double alpha, double xa, double xb) {
            VariationalProblem p;
            p.lagrangian = Lagrangian::quadratic_bilinear(coeff);
            p.grid = make_grid(a, b, nodes);
            p.alpha = FracOrder::of(alpha);
            p.X_a = xa;
            p.X_b = xb;
            return p;
        },
        py::arg("coeff") = 1.0, py::arg("a") = 0.01, py::arg("b") = 0.99, py::arg("nodes") = 99,
        py::arg("alpha") = 0.25, py::arg("x_a") = 1.0, py::arg("x_b") = 1.0);
    m.def(
        "kinetic_problem",
        [](double mass, const std::string& potential, double a, double b, int nodes, double alpha,
           double xa, double xb) {
            VariationalProblem p;
            p.lagrangian = Lagrangian::kinetic_potential(mass, potential);
            p.grid = make_grid(a, b, nodes);
            p.alpha = FracOrder::of(alpha);
            p.X_a = xa;
            p.X_b = xb;
            return p;
        },
        py::arg("mass") = 1.0, py::arg("potential") = "zero", py::arg("a") = 0.0,
        py::arg("b") = 1.0, py::arg("nodes") = 101, py::arg("alpha") = 0.25, py::arg("x_a") = 0.0,
        py::arg("x_b") = 0.0);

    py::class_<Extremal>(m, "Extremal")
        .def_readonly("mean", &Extremal::mean)
        .def_readonly("J_value", &Extremal::J_value)
        .def_readonly("el_residual", &Extremal::el_residual)
        .def_readonly("el_residual_norm", &Extremal::el_residual_norm);
    m.def("evaluate_J", &evaluate_J);
    m.def("el_residual", &el_residual);
    m.def("solve_quadratic", &solve_quadratic);
    m.def("solve_descent", &solve_descent, py::arg("problem"), py::arg("init"),
          py::arg("steps") = 20000, py::arg("rate") = 1.0);

    py::class_<C1HNormReport>(m, "C1HNormReport")
        .def_readonly("sup_H_norm", &C1HNormReport::sup_H_norm)
        .def_readonly("sup_left_deriv", &C1HNormReport::sup_left_deriv)
        .def_readonly("sup_right_deriv", &C1HNormReport::sup_right_deriv)
        .def_readonly("total", &C1HNormReport::total);
    m.def("c1h_norm", [](const Ensemble& e, double alpha) {
        return c1h_norm(e, FracOrder::of(alpha));
    });
}
