#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stochfrac {

/// Minimal sectioned key=value format:
///   [section name]
///   key = value      # trailing comments allowed
/// Blank lines and lines starting with # are ignored. Parse errors carry the
/// line number.
struct KeyValue {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

std::vector<KeyValue> parse_keyvalues(std::istream& is, const std::string& name);

std::vector<std::string> split_list(const std::string& csv_list);

double to_double(const KeyValue& kv, const std::string& name);
int to_int(const KeyValue& kv, const std::string& name);

}  // namespace stochfrac
