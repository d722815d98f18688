#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stochfrac/grid.hpp"

namespace stochfrac::csv {

/// Shortest round-trippable decimal form (17 significant digits).
std::string format(double v);

std::vector<std::string> split(const std::string& line, char sep = ',');

/// Parses a double; throws std::runtime_error naming file and row on failure.
double parse_double(const std::string& field, const std::string& name, int lineno);

}  // namespace stochfrac::csv

namespace stochfrac {

/// GriddedFn CSV: header `t,value`, one row per node, t strictly increasing.
void save_fn_csv(const GriddedFn& f, const std::string& path);
GriddedFn load_fn_csv(const std::string& path);
void save_fn_csv(const GriddedFn& f, std::ostream& os);
GriddedFn load_fn_csv(std::istream& is, const std::string& name);

/// Multi-column variant used by the CLI (`t,value,stderr`, `t,mean,el_residual`).
void save_columns_csv(const std::string& path, const std::vector<std::string>& names,
                      const Grid& grid, const std::vector<const std::vector<double>*>& cols);

}  // namespace stochfrac
