#include "stochfrac/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stochfrac::csv {

std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& field, const std::string& name, int lineno) {
    try {
        std::size_t pos = 0;
        double v = std::stod(field, &pos);
        if (pos != field.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(name + ": cannot parse number '" + field + "' at row " +
                                 std::to_string(lineno));
    }
}

}  // namespace stochfrac::csv

namespace stochfrac {

void save_fn_csv(const GriddedFn& f, std::ostream& os) {
    os << "t,value\n";
    for (int i = 0; i < f.size(); ++i)
        os << csv::format(f.grid.node(i)) << ',' << csv::format(f[i]) << "\n";
}

void save_fn_csv(const GriddedFn& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_fn_csv: cannot open " + path);
    save_fn_csv(f, os);
}

GriddedFn load_fn_csv(std::istream& is, const std::string& name) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error(name + ": empty file");
    auto header = csv::split(line);
    if (header.size() != 2 || header[0] != "t" || header[1] != "value")
        throw std::runtime_error(name + ": malformed header, expected t,value");
    std::vector<double> ts, vs;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = csv::split(line);
        if (fields.size() != 2)
            throw std::runtime_error(name + ": row " + std::to_string(lineno) +
                                     " must have 2 fields");
        ts.push_back(csv::parse_double(fields[0], name, lineno));
        vs.push_back(csv::parse_double(fields[1], name, lineno));
        if (!std::isfinite(ts.back()) || !std::isfinite(vs.back()))
            throw std::runtime_error(name + ": non-finite entry at row " + std::to_string(lineno));
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
    return GriddedFn(g, std::move(vs));
}

GriddedFn load_fn_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_fn_csv: cannot open " + path);
    return load_fn_csv(is, path);
}

void save_columns_csv(const std::string& path, const std::vector<std::string>& names,
                      const Grid& grid, const std::vector<const std::vector<double>*>& cols) {
    if (names.size() != cols.size() + 1)
        throw std::invalid_argument("save_columns_csv: names must be t + one per column");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_columns_csv: cannot open " + path);
    for (std::size_t k = 0; k < names.size(); ++k) os << (k ? "," : "") << names[k];
    os << "\n";
    for (int i = 0; i < grid.n_nodes; ++i) {
        os << csv::format(grid.node(i));
        for (const auto* col : cols) os << ',' << csv::format((*col)[static_cast<std::size_t>(i)]);
        os << "\n";
    }
}

}  // namespace stochfrac
