#include <stdexcept>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "stochfrac/grid.hpp"

using namespace stochfrac;

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

TEST_CASE("make_grid basics") {
    Grid g = make_grid(0.0, 1.0, 11);
    CHECK(g.h == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(g.node(5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(g.node(10) - 1.0) <= 4.0 * kEps);

    Grid e2 = make_grid(0.01, 0.99, 99);
    CHECK(e2.h == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(std::abs(e2.node(98) - 0.99) <= 4.0 * kEps * 1.0);

    Grid tiny = make_grid(0.0, 1.0, 2);
    CHECK(tiny.node(0) == 0.0);
    CHECK(tiny.node(1) == 1.0);
    CHECK(tiny.h == 1.0);
}

TEST_CASE("make_grid validation") {
    CHECK_THROWS_AS(make_grid(1.0, 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1.0, 1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(0.0, std::numeric_limits<double>::infinity(), 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_grid(std::nan(""), 1.0, 10), std::invalid_argument);
}

TEST_CASE("gridded fn validation") {
    Grid g = make_grid(0.0, 1.0, 3);
    CHECK_THROWS_AS(GriddedFn(g, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(GriddedFn(g, {1.0, std::nan(""), 2.0}), std::invalid_argument);
}

TEST_CASE("trapezoid exact cases") {
    Grid g = make_grid(0.0, 1.0, 17);
    CHECK(trapezoid(GriddedFn::constant(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(trapezoid(GriddedFn::sample(g, [](double t) { return t; })) ==
          doctest::Approx(0.5).epsilon(1e-15));

    Grid fine = make_grid(0.0, 1.0, 1001);
    const double q = trapezoid(GriddedFn::sample(fine, [](double t) { return t * t; }));
    CHECK(std::abs(q - 1.0 / 3.0) <= 1e-6);
}

TEST_CASE("trapezoid linearity") {
    Grid g = make_grid(-1.0, 2.0, 101);
    GriddedFn f = GriddedFn::sample(g, [](double t) { return std::sin(3.0 * t); });
    GriddedFn h = GriddedFn::sample(g, [](double t) { return std::exp(t); });
    const double c = 1.7, d = -0.3;
    GriddedFn comb = f;
    for (int i = 0; i < g.n_nodes; ++i) comb[i] = c * f[i] + d * h[i];
    const double lhs = trapezoid(comb);
    const double rhs = c * trapezoid(f) + d * trapezoid(h);
    CHECK(std::abs(lhs - rhs) <= 8.0 * kEps * (std::abs(lhs) + std::abs(c) * 3.0 + std::abs(d) * 8.0));
}

TEST_CASE("finite_diff exact stencils") {
    Grid g = make_grid(0.0, 1.0, 101);
    GriddedFn lin = GriddedFn::sample(g, [](double t) { return 3.0 * t; });
    GriddedFn d1 = finite_diff(lin, 1);
    for (int i = 0; i < g.n_nodes; ++i) CHECK(d1[i] == doctest::Approx(3.0).epsilon(1e-12));

    GriddedFn quad = GriddedFn::sample(g, [](double t) { return t * t; });
    GriddedFn d2 = finite_diff(quad, 2);
    for (int i = 1; i < g.n_nodes - 1; ++i) CHECK(std::abs(d2[i] - 2.0) <= 1e-8);

    GriddedFn c = GriddedFn::constant(g, 4.2);
    GriddedFn dc = finite_diff(c, 1);
    for (int i = 0; i < g.n_nodes; ++i) CHECK(dc[i] == 0.0);
}

TEST_CASE("finite_diff sin oracle") {
    Grid g = make_grid(0.0, 1.0, 1001);
    GriddedFn f = GriddedFn::sample(g, [](double t) { return std::sin(t); });
    GriddedFn d = finite_diff(f, 1);
    double worst = 0.0;
    for (int i = 0; i < g.n_nodes; ++i)
        worst = std::max(worst, std::abs(d[i] - std::cos(g.node(i))));
    CHECK(worst <= 1e-5);
}

TEST_CASE("finite_diff rejects bad order") {
    Grid g = make_grid(0.0, 1.0, 11);
    GriddedFn f = GriddedFn::constant(g, 0.0);
    CHECK_THROWS_AS(finite_diff(f, 0), std::invalid_argument);
    CHECK_THROWS_AS(finite_diff(f, 3), std::invalid_argument);
    Grid small = make_grid(0.0, 1.0, 3);
    CHECK_THROWS_AS(finite_diff(GriddedFn::constant(small, 0.0), 2), std::invalid_argument);
}

TEST_CASE("trapezoid error decays as h^2") {
    auto err = [](int n) {
        Grid g = make_grid(0.0, 1.0, n);
        const double exact = 1.0 - std::cos(1.0);
        return std::abs(trapezoid(GriddedFn::sample(g, [](double t) { return std::sin(t); })) -
                        exact);
    };
    const double ratio = err(51) / err(101);
    CHECK(ratio >= 3.2);
    CHECK(ratio <= 4.8);
}

TEST_CASE("decimate and reflect") {
    Grid g = make_grid(0.0, 1.0, 9);
    GriddedFn f = GriddedFn::sample(g, [](double t) { return t * t; });
    GriddedFn c = decimate(f, 2);
    CHECK(c.size() == 5);
    CHECK(c[1] == f[2]);
    CHECK_THROWS_AS(decimate(f, 3), std::invalid_argument);

    GriddedFn r = reflect(f);
    CHECK(r[0] == f[8]);
    CHECK(r[8] == f[0]);
}
