#include <stdexcept>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "stochfrac/csv_io.hpp"
#include "stochfrac/ensemble.hpp"
#include "stochfrac/fracnum.hpp"
#include <unistd.h>

namespace fs = std::filesystem;
using namespace stochfrac;

namespace {

struct CliRunner {
    fs::path dir;
    std::string exe;

    CliRunner() {
        const char* env = std::getenv("STOCHFRAC_CLI");
        REQUIRE_MESSAGE(env != nullptr, "STOCHFRAC_CLI must point at the built binary");
        exe = env;
        dir = fs::temp_directory_path() /
              ("stochfrac_cli_test_" + std::to_string(::getpid()) + "_" +
               std::to_string(counter()++));
        fs::create_directories(dir);
    }
    ~CliRunner() { fs::remove_all(dir); }

    static int& counter() {
        static int c = 0;
        return c;
    }

    int run(const std::string& args, std::string* out = nullptr, std::string* err = nullptr) {
        const fs::path so = dir / "stdout.txt";
        const fs::path se = dir / "stderr.txt";
        const std::string cmd =
            "cd " + dir.string() + " && " + exe + " " + args + " >" + so.string() + " 2>" +
            se.string();
        int rc = std::system(cmd.c_str());
        if (out) *out = slurp(so);
        if (err) *err = slurp(se);
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream is(p);
        std::ostringstream os;
        os << is.rdbuf();
        return os.str();
    }

    std::string file(const std::string& name) { return slurp(dir / name); }
    bool exists(const std::string& name) { return fs::exists(dir / name); }
    void write(const std::string& name, const std::string& content) {
        std::ofstream os(dir / name);
        os << content;
    }
};

}  // namespace

TEST_CASE("gen writes a loadable, reproducible ensemble") {
    CliRunner cli;
    std::string err;
    CHECK(cli.run("gen --process ou --theta 1.0 --sigma 0.2 --x0 1.0 --paths 50 --a 0 --b 1 "
                  "--nodes 101 --seed 42 --out paths.csv",
                  nullptr, &err) == 0);
    CHECK(err.find("seed=42") != std::string::npos);  // resolved config on stderr
    Ensemble e = load_ensemble_csv((cli.dir / "paths.csv").string());
    CHECK(e.m_paths() == 50);
    CHECK(e.grid().n_nodes == 101);

    CHECK(cli.run("gen --process ou --theta 1.0 --sigma 0.2 --x0 1.0 --paths 50 --a 0 --b 1 "
                  "--nodes 101 --seed 42 --out paths2.csv") == 0);
    CHECK(cli.file("paths.csv") == cli.file("paths2.csv"));

    // byte-identical under a different thread cap
    setenv("STOCHFRAC_THREADS", "5", 1);
    CHECK(cli.run("gen --process ou --theta 1.0 --sigma 0.2 --x0 1.0 --paths 50 --a 0 --b 1 "
                  "--nodes 101 --seed 42 --out paths3.csv") == 0);
    unsetenv("STOCHFRAC_THREADS");
    CHECK(cli.file("paths.csv") == cli.file("paths3.csv"));
}

TEST_CASE("frac applies operators and validates flags") {
    CliRunner cli;
    {
        Grid g = make_grid(0.0, 1.0, 201);
        save_fn_csv(GriddedFn::sample(g, [](double t) { return t; }), (cli.dir / "f.csv").string());
    }
    CHECK(cli.run("frac --op rl-deriv --side left --alpha 0.5 --backend gl --in f.csv "
                  "--out out.csv") == 0);
    GriddedFn out = load_fn_csv((cli.dir / "out.csv").string());
    GriddedFn expect = rl_deriv(load_fn_csv((cli.dir / "f.csv").string()), FracOrder::of(0.5),
                                Side::left);
    CHECK(out.values == expect.values);

    std::string err;
    CHECK(cli.run("frac --alpha -1 --in f.csv --out out2.csv", nullptr, &err) == 1);
    CHECK(err.find("alpha must be positive") != std::string::npos);

    CHECK(cli.run("frac --op series --N 1 --alpha 0.5 --in f.csv --out s.csv") == 0);
    CHECK(cli.exists("s.csv"));

    CHECK(cli.run("frac --in f.csv --no-such-flag 3", nullptr, &err) == 1);
}

TEST_CASE("stochfrac subcommand produces t,value,stderr") {
    CliRunner cli;
    CHECK(cli.run("gen --process wiener --paths 20 --nodes 65 --seed 7 --out p.csv") == 0);
    CHECK(cli.run("stochfrac --kind d3 --alpha 0.5 --in p.csv --out r.csv") == 0);
    std::ifstream is(cli.dir / "r.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,value,stderr");
    int rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    CHECK(rows == 65);

    std::string err;
    CHECK(cli.run("stochfrac --kind d9 --alpha 0.5 --in p.csv --out r.csv", nullptr, &err) == 1);
    CHECK(err.find("d1..d6") != std::string::npos);
}

TEST_CASE("verify runs a small config and reports skips for degenerate grids") {
    CliRunner cli;
    cli.write("small.cfg", R"([suite]
alphas = 0.5
n_nodes = 129
m_paths = 100
seed = 3

[process det_quadratic]
kind = det
drift = quadratic
sigma = 0
partner_drift = linear
)");
    std::string out;
    CHECK(cli.run("verify --config small.cfg --out report.csv", &out) == 0);
    CHECK(out.find("PASS") != std::string::npos);
    CHECK(cli.exists("report.csv"));
    std::string report = cli.file("report.csv");
    CHECK(report.rfind("identity,alpha,process,n_nodes,residual,tolerance,passed", 0) == 0);
    CHECK(report.find("series_vs_gl_N1") != std::string::npos);

    cli.write("tiny.cfg", R"([suite]
alphas = 0.5
n_nodes = 2
m_paths = 10

[process w]
kind = wiener
)");
    std::string out2;
    CHECK(cli.run("verify --config tiny.cfg --out tiny.csv", &out2) == 0);
    CHECK(cli.file("tiny.csv").find("skipped") != std::string::npos);

    cli.write("broken.cfg", "alphas = nope\n");
    std::string err;
    CHECK(cli.run("verify --config broken.cfg --out x.csv", nullptr, &err) == 1);
    CHECK(err.find("broken.cfg:1") != std::string::npos);
}

TEST_CASE("solve presets and config files") {
    CliRunner cli;
    CHECK(cli.run("solve --problem example2 --out ex.csv") == 0);
    std::ifstream is(cli.dir / "ex.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,mean,el_residual");

    cli.write("prob.cfg", R"(lagrangian = kinetic_potential
flavor = rl
mass = 1.0
potential = harmonic
alpha = 0.25
a = 0.01
b = 0.99
nodes = 41
x_a = 1.0
x_b = 1.0
solver = descent
steps = 500
rate = 0.5
)");
    CHECK(cli.run("solve --config prob.cfg --out k.csv") == 0);
    CHECK(cli.exists("k.csv"));

    std::string err;
    CHECK(cli.run("solve --problem nope --out x.csv", nullptr, &err) == 1);
}

TEST_CASE("reproduce-example2 emits the curve and passes its own checks") {
    CliRunner cli;
    std::string out;
    CHECK(cli.run("reproduce-example2 --nodes 99 --out curve.csv", &out) == 0);
    CHECK(out.find("all passed") != std::string::npos);
    std::ifstream is(cli.dir / "curve.csv");
    std::string line;
    std::getline(is, line);
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 99);

    // byte-identical across repeated runs
    CHECK(cli.run("reproduce-example2 --nodes 99 --out curve2.csv", &out) == 0);
    CHECK(cli.file("curve.csv") == cli.file("curve2.csv"));
}

TEST_CASE("bad invocations exit with code 1") {
    CliRunner cli;
    std::string err;
    CHECK(cli.run("no-such-command", nullptr, &err) == 1);
    CHECK(cli.run("", nullptr, &err) == 1);
}
