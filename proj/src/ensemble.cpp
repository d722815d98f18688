#include "stochfrac/ensemble.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "stochfrac/csv_io.hpp"
#include "stochfrac/parallel.hpp"
#include "stochfrac/rng.hpp"

namespace stochfrac {

ProcessKind process_kind_from_string(const std::string& s) {
    if (s == "wiener") return ProcessKind::wiener;
    if (s == "ou" || s == "ornstein_uhlenbeck") return ProcessKind::ornstein_uhlenbeck;
    if (s == "gbm" || s == "geometric_brownian") return ProcessKind::geometric_brownian;
    if (s == "det" || s == "deterministic_plus_noise") return ProcessKind::deterministic_plus_noise;
    throw std::invalid_argument("unknown process kind: " + s);
}

std::string to_string(ProcessKind k) {
    switch (k) {
        case ProcessKind::wiener: return "wiener";
        case ProcessKind::ornstein_uhlenbeck: return "ou";
        case ProcessKind::geometric_brownian: return "gbm";
        case ProcessKind::deterministic_plus_noise: return "det";
    }
    return "?";
}

void ProcessSpec::validate() const {
    if (!(sigma >= 0.0)) throw std::invalid_argument("ProcessSpec: sigma must be >= 0");
    if (m_paths < 1) throw std::invalid_argument("ProcessSpec: m_paths must be >= 1");
    if (kind == ProcessKind::ornstein_uhlenbeck && !(theta >= 0.0))
        throw std::invalid_argument("ProcessSpec: theta must be >= 0");
    if (!std::isfinite(x0) || !std::isfinite(mu) || !std::isfinite(theta) || !std::isfinite(sigma))
        throw std::invalid_argument("ProcessSpec: parameters must be finite");
    if (kind == ProcessKind::deterministic_plus_noise) drift_function(drift_id);  // validates id
}

std::function<double(double)> drift_function(const std::string& id) {
    if (id == "zero") return [](double) { return 0.0; };
    if (id == "one") return [](double) { return 1.0; };
    if (id == "linear") return [](double t) { return t; };
    if (id == "quadratic") return [](double t) { return t * t; };
    if (id == "sqrt") return [](double t) { return std::sqrt(t); };
    if (id == "sin") return [](double t) { return std::sin(t); };
    throw std::invalid_argument("unknown drift id: " + id);
}

Ensemble::Ensemble(Grid grid, std::vector<double> flat_paths, int m_paths, std::uint64_t seed)
    : grid_(grid), data_(std::move(flat_paths)), m_(m_paths), seed_(seed) {
    if (m_ < 1) throw std::invalid_argument("Ensemble: need at least one path");
    if (data_.size() != static_cast<std::size_t>(m_) * static_cast<std::size_t>(grid_.n_nodes))
        throw std::invalid_argument("Ensemble: path data size mismatch");
    for (double v : data_)
        if (!std::isfinite(v)) throw std::invalid_argument("Ensemble: non-finite path entry");
}

Ensemble generate(const ProcessSpec& spec, const Grid& grid, std::uint64_t seed) {
    spec.validate();
    const int n = grid.n_nodes;
    const int m = spec.m_paths;
    const double h = grid.h;
    const double sqrth = std::sqrt(h);
    std::vector<double> data(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));

    auto drift = spec.kind == ProcessKind::deterministic_plus_noise
                     ? drift_function(spec.drift_id)
                     : std::function<double(double)>();

    parallel_for(static_cast<std::size_t>(m), [&](std::size_t p) {
        NormalRng rng(path_seed(seed, p));
        double* x = data.data() + p * static_cast<std::size_t>(n);
        switch (spec.kind) {
            case ProcessKind::wiener:
                x[0] = spec.x0;
                for (int i = 1; i < n; ++i)
                    x[i] = x[i - 1] + spec.sigma * sqrth * rng.next_normal();
                break;
            case ProcessKind::ornstein_uhlenbeck:
                x[0] = spec.x0;
                for (int i = 1; i < n; ++i)
                    x[i] = x[i - 1] - spec.theta * x[i - 1] * h +
                           spec.sigma * sqrth * rng.next_normal();
                break;
            case ProcessKind::geometric_brownian:
                x[0] = spec.x0;
                for (int i = 1; i < n; ++i)
                    x[i] = x[i - 1] + spec.mu * x[i - 1] * h +
                           spec.sigma * x[i - 1] * sqrth * rng.next_normal();
                break;
            case ProcessKind::deterministic_plus_noise:
                for (int i = 0; i < n; ++i)
                    x[i] = drift(grid.node(i)) +
                           (spec.sigma > 0.0 ? spec.sigma * rng.next_normal() : 0.0);
                break;
        }
    });
    return Ensemble(grid, std::move(data), m, seed);
}

Ensemble deterministic_ensemble(const GriddedFn& f, int m_paths) {
    const int n = f.size();
    std::vector<double> data(static_cast<std::size_t>(m_paths) * static_cast<std::size_t>(n));
    for (int p = 0; p < m_paths; ++p)
        for (int i = 0; i < n; ++i)
            data[static_cast<std::size_t>(p) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(i)] = f[i];
    return Ensemble(f.grid, std::move(data), m_paths, 0);
}

MeanPath mean_path(const Ensemble& e) {
    const int n = e.grid().n_nodes;
    const int m = e.m_paths();
    std::vector<double> mean(static_cast<std::size_t>(n), 0.0);
    std::vector<double> se(static_cast<std::size_t>(n), 0.0);
    // accumulate deviations from the first path: ensembles of identical paths
    // (sigma = 0) then report an exactly zero spread
    auto base = e.path(0);
    for (int p = 1; p < m; ++p) {
        auto path = e.path(p);
        for (int i = 0; i < n; ++i)
            mean[static_cast<std::size_t>(i)] +=
                path[static_cast<std::size_t>(i)] - base[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < n; ++i)
        mean[static_cast<std::size_t>(i)] =
            base[static_cast<std::size_t>(i)] +
            mean[static_cast<std::size_t>(i)] / static_cast<double>(m);
    if (m > 1) {
        for (int p = 0; p < m; ++p) {
            auto path = e.path(p);
            for (int i = 0; i < n; ++i) {
                const double d = path[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)];
                se[static_cast<std::size_t>(i)] += d * d;
            }
        }
        const double denom = static_cast<double>(m - 1) * static_cast<double>(m);
        for (auto& v : se) v = std::sqrt(v / denom);
    }
    return {GriddedFn(e.grid(), std::move(mean)), GriddedFn(e.grid(), std::move(se))};
}

Ensemble merge(const Ensemble& e1, const Ensemble& e2) {
    if (!e1.grid().same_as(e2.grid())) throw std::invalid_argument("merge: grid mismatch");
    std::vector<double> data = e1.flat();
    data.insert(data.end(), e2.flat().begin(), e2.flat().end());
    return Ensemble(e1.grid(), std::move(data), e1.m_paths() + e2.m_paths(), 0);
}

Ensemble linear_combine(double c, const Ensemble& e1, double d, const Ensemble& e2) {
    if (!e1.grid().same_as(e2.grid())) throw std::invalid_argument("linear_combine: grid mismatch");
    if (e1.m_paths() != e2.m_paths())
        throw std::invalid_argument("linear_combine: path counts must match");
    std::vector<double> data(e1.flat().size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = c * e1.flat()[i] + d * e2.flat()[i];
    return Ensemble(e1.grid(), std::move(data), e1.m_paths(), 0);
}

Ensemble decimate(const Ensemble& e, int stride) {
    Grid g = decimate(e.grid(), stride);
    const int n = g.n_nodes;
    const int m = e.m_paths();
    std::vector<double> data(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
    for (int p = 0; p < m; ++p)
        for (int i = 0; i < n; ++i)
            data[static_cast<std::size_t>(p) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(i)] = e.at(p, i * stride);
    return Ensemble(g, std::move(data), m, 0);
}

void save_csv(const Ensemble& e, std::ostream& os) {
    os << "t";
    for (int p = 0; p < e.m_paths(); ++p) os << ",path_" << p;
    os << "\n";
    for (int i = 0; i < e.grid().n_nodes; ++i) {
        os << csv::format(e.grid().node(i));
        for (int p = 0; p < e.m_paths(); ++p) os << ',' << csv::format(e.at(p, i));
        os << "\n";
    }
}

void save_csv(const Ensemble& e, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_csv: cannot open " + path);
    save_csv(e, os);
}

Ensemble load_ensemble_csv(std::istream& is, const std::string& name) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error(name + ": empty file");
    auto header = csv::split(line);
    if (header.size() < 2 || header[0] != "t")
        throw std::runtime_error(name + ": malformed header, expected t,path_0,...");
    for (std::size_t p = 1; p < header.size(); ++p)
        if (header[p] != "path_" + std::to_string(p - 1))
            throw std::runtime_error(name + ": malformed header column " + std::to_string(p + 1));
    const int m = static_cast<int>(header.size()) - 1;

    std::vector<double> ts;
    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = csv::split(line);
        if (fields.size() != header.size())
            throw std::runtime_error(name + ": row " + std::to_string(lineno) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        std::vector<double> vals(fields.size());
        for (std::size_t k = 0; k < fields.size(); ++k) {
            vals[k] = csv::parse_double(fields[k], name, lineno);
            if (!std::isfinite(vals[k]))
                throw std::runtime_error(name + ": non-finite entry at row " +
                                         std::to_string(lineno));
        }
        ts.push_back(vals[0]);
        vals.erase(vals.begin());
        rows.push_back(std::move(vals));
    }
    if (ts.size() < 2) throw std::runtime_error(name + ": need at least 2 rows");
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (!(ts[i] > ts[i - 1]))
            throw std::runtime_error(name + ": t column not strictly increasing at row " +
                                     std::to_string(i + 2));
    Grid g = make_grid(ts.front(), ts.back(), static_cast<int>(ts.size()));
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (std::abs(ts[i] - g.node(static_cast<int>(i))) > 1e-9)
            throw std::runtime_error(name + ": t column deviates from uniform spacing at row " +
                                     std::to_string(i + 2));
    std::vector<double> data(static_cast<std::size_t>(m) * ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (int p = 0; p < m; ++p)
            data[static_cast<std::size_t>(p) * ts.size() + i] = rows[i][static_cast<std::size_t>(p)];
    return Ensemble(g, std::move(data), m, 0);
}

Ensemble load_ensemble_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_ensemble_csv: cannot open " + path);
    return load_ensemble_csv(is, path);
}

}  // namespace stochfrac
