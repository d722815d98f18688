#include "stochfrac/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace stochfrac {

std::vector<double> Grid::nodes() const {
    std::vector<double> out(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) out[static_cast<std::size_t>(i)] = node(i);
    return out;
}

Grid make_grid(double a, double b, int n_nodes) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("make_grid: endpoints must be finite");
    if (!(a < b))
        throw std::invalid_argument("make_grid: a must be < b");
    if (n_nodes < 2)
        throw std::invalid_argument("make_grid: n_nodes must be >= 2");
    Grid g;
    g.a = a;
    g.b = b;
    g.n_nodes = n_nodes;
    g.h = (b - a) / static_cast<double>(n_nodes - 1);
    return g;
}

Grid decimate(const Grid& g, int stride) {
    if (stride < 1 || (g.n_nodes - 1) % stride != 0)
        throw std::invalid_argument("decimate: stride must divide n_nodes-1");
    return make_grid(g.a, g.b, (g.n_nodes - 1) / stride + 1);
}

GriddedFn::GriddedFn(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != static_cast<std::size_t>(grid.n_nodes))
        throw std::invalid_argument("GriddedFn: values.size() != grid.n_nodes");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw std::invalid_argument("GriddedFn: non-finite value at node " + std::to_string(i));
}

GriddedFn GriddedFn::sample(const Grid& g, const std::function<double(double)>& f) {
    std::vector<double> v(static_cast<std::size_t>(g.n_nodes));
    for (int i = 0; i < g.n_nodes; ++i) v[static_cast<std::size_t>(i)] = f(g.node(i));
    return GriddedFn(g, std::move(v));
}

GriddedFn GriddedFn::constant(const Grid& g, double c) {
    return GriddedFn(g, std::vector<double>(static_cast<std::size_t>(g.n_nodes), c));
}

double trapezoid(const GriddedFn& f) {
    const int n = f.size();
    double acc = 0.5 * (f[0] + f[n - 1]);
    for (int i = 1; i < n - 1; ++i) acc += f[i];
    return acc * f.grid.h;
}

GriddedFn finite_diff(const GriddedFn& f, int order) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("finite_diff: order must be 1 or 2");
    const int n = f.size();
    if (n < order + 2)
        throw std::invalid_argument("finite_diff: grid too small for requested order");
    const double h = f.grid.h;
    std::vector<double> d(static_cast<std::size_t>(n));
    if (order == 1) {
        const double w = 1.0 / (2.0 * h);
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * w;
        for (int i = 1; i < n - 1; ++i) d[static_cast<std::size_t>(i)] = (f[i + 1] - f[i - 1]) * w;
        d[static_cast<std::size_t>(n - 1)] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * w;
    } else {
        const double w = 1.0 / (h * h);
        d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * w;
        for (int i = 1; i < n - 1; ++i)
            d[static_cast<std::size_t>(i)] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * w;
        d[static_cast<std::size_t>(n - 1)] =
            (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * w;
    }
    return GriddedFn(f.grid, std::move(d));
}

GriddedFn decimate(const GriddedFn& f, int stride) {
    Grid g = decimate(f.grid, stride);
    std::vector<double> v(static_cast<std::size_t>(g.n_nodes));
    for (int i = 0; i < g.n_nodes; ++i) v[static_cast<std::size_t>(i)] = f[i * stride];
    return GriddedFn(g, std::move(v));
}

GriddedFn reflect(const GriddedFn& f) {
    const int n = f.size();
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = f[n - 1 - i];
    return GriddedFn(f.grid, std::move(v));
}

double sup_diff(const GriddedFn& f, const GriddedFn& g, int lo, int hi) {
    if (!f.grid.same_as(g.grid)) throw std::invalid_argument("sup_diff: grid mismatch");
    double m = 0.0;
    for (int i = lo; i < hi; ++i) m = std::max(m, std::abs(f[i] - g[i]));
    return m;
}

double sup_abs(const GriddedFn& f, int lo, int hi) {
    double m = 0.0;
    for (int i = lo; i < hi; ++i) m = std::max(m, std::abs(f[i]));
    return m;
}

}  // namespace stochfrac
