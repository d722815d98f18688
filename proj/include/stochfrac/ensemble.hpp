#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stochfrac/grid.hpp"

namespace stochfrac {

enum class ProcessKind { wiener, ornstein_uhlenbeck, geometric_brownian, deterministic_plus_noise };

ProcessKind process_kind_from_string(const std::string& s);
std::string to_string(ProcessKind k);

/// Parameters of a second-order process generator. `drift_id` names the
/// deterministic drift used by deterministic_plus_noise; see drift_function().
struct ProcessSpec {
    ProcessKind kind = ProcessKind::wiener;
    double theta = 0.0;  // OU mean-reversion rate, 1/time
    double sigma = 1.0;  // diffusion
    double x0 = 0.0;     // initial value
    double mu = 0.0;     // GBM drift rate
    std::string drift_id = "zero";
    int m_paths = 1;

    void validate() const;  // throws std::invalid_argument
};

/// Named drift functions for deterministic_plus_noise:
/// zero, one, linear, quadratic, sqrt, sin.
std::function<double(double)> drift_function(const std::string& id);

/// Finite ensemble of sample paths on a shared grid; the discrete stand-in for
/// a second-order stochastic process. Immutable after construction.
class Ensemble {
public:
    Ensemble(Grid grid, std::vector<double> flat_paths, int m_paths, std::uint64_t seed);

    const Grid& grid() const { return grid_; }
    int m_paths() const { return m_; }
    std::uint64_t seed() const { return seed_; }

    std::span<const double> path(int p) const {
        return {data_.data() + static_cast<std::size_t>(p) * static_cast<std::size_t>(grid_.n_nodes),
                static_cast<std::size_t>(grid_.n_nodes)};
    }
    double at(int p, int i) const {
        return data_[static_cast<std::size_t>(p) * static_cast<std::size_t>(grid_.n_nodes) +
                     static_cast<std::size_t>(i)];
    }
    const std::vector<double>& flat() const { return data_; }

private:
    Grid grid_;
    std::vector<double> data_;  // m_ x n_nodes, row-major per path
    int m_ = 0;
    std::uint64_t seed_ = 0;
};

/// Euler-Maruyama sample paths (exact transitions for the Wiener case).
/// Per-path RNG streams are derived from (seed, path index), so the result is
/// bit-identical regardless of thread count or scheduling.
Ensemble generate(const ProcessSpec& spec, const Grid& grid, std::uint64_t seed);

/// Degenerate ensemble: m_paths copies of a given deterministic function.
Ensemble deterministic_ensemble(const GriddedFn& f, int m_paths = 1);

struct MeanPath {
    GriddedFn mean;       // pointwise sample mean, the estimator of t -> E(X_t)
    GriddedFn std_error;  // sqrt(sample variance / M), 0 when M == 1
};

MeanPath mean_path(const Ensemble& e);

/// Concatenates the paths of two ensembles on the same grid.
Ensemble merge(const Ensemble& e1, const Ensemble& e2);

/// Pathwise c*e1 + d*e2; requires same grid and equal path counts.
Ensemble linear_combine(double c, const Ensemble& e1, double d, const Ensemble& e2);

/// Node decimation (keeps every stride-th node of every path).
Ensemble decimate(const Ensemble& e, int stride);

/// CSV persistence. Header `t,path_0,...,path_{M-1}`, one row per node,
/// 17 significant digits so save/load round-trips bit-exactly.
void save_csv(const Ensemble& e, const std::string& path);
Ensemble load_ensemble_csv(const std::string& path);
void save_csv(const Ensemble& e, std::ostream& os);
Ensemble load_ensemble_csv(std::istream& is, const std::string& name);

}  // namespace stochfrac
