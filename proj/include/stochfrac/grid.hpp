#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace stochfrac {

/// Uniform time grid on [a, b] with n_nodes >= 2 nodes, spacing h = (b-a)/(n_nodes-1).
struct Grid {
    double a = 0.0;
    double b = 1.0;
    int n_nodes = 2;
    double h = 1.0;

    double node(int i) const { return a + static_cast<double>(i) * h; }
    std::vector<double> nodes() const;

    bool same_as(const Grid& other) const {
        return a == other.a && b == other.b && n_nodes == other.n_nodes;
    }
};

/// Validating factory. Throws std::invalid_argument on a >= b, n_nodes < 2,
/// or non-finite endpoints.
Grid make_grid(double a, double b, int n_nodes);

/// Coarsen by keeping every `stride`-th node. Requires (n_nodes-1) % stride == 0.
Grid decimate(const Grid& g, int stride);

/// Real-valued function sampled on a Grid. Values are validated finite on construction.
struct GriddedFn {
    Grid grid;
    std::vector<double> values;

    GriddedFn() = default;
    GriddedFn(Grid g, std::vector<double> v);

    static GriddedFn sample(const Grid& g, const std::function<double(double)>& f);
    static GriddedFn constant(const Grid& g, double c);

    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    int size() const { return grid.n_nodes; }
};

/// Composite trapezoid estimate of the integral over [a, b].
double trapezoid(const GriddedFn& f);

/// First or second derivative on the grid: central differences at interior
/// nodes, one-sided second-order stencils at the endpoints.
/// order must be 1 or 2; the grid needs at least order + 2 nodes.
GriddedFn finite_diff(const GriddedFn& f, int order);

/// Keep every `stride`-th value (grid decimation for two-resolution error checks).
GriddedFn decimate(const GriddedFn& f, int stride);

/// v(t) -> v(a + b - t), exact reflection of the sample vector.
GriddedFn reflect(const GriddedFn& f);

/// sup_i |f_i - g_i| over nodes [lo, hi); grids must match.
double sup_diff(const GriddedFn& f, const GriddedFn& g, int lo, int hi);

/// sup_i |f_i| over nodes [lo, hi).
double sup_abs(const GriddedFn& f, int lo, int hi);

}  // namespace stochfrac
