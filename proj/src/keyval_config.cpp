#include "stochfrac/keyval_config.hpp"

#include <istream>
#include <stdexcept>

namespace stochfrac {

namespace {

std::string trim(const std::string& s) {
    const auto lo = s.find_first_not_of(" \t\r");
    if (lo == std::string::npos) return "";
    const auto hi = s.find_last_not_of(" \t\r");
    return s.substr(lo, hi - lo + 1);
}

}  // namespace

std::vector<KeyValue> parse_keyvalues(std::istream& is, const std::string& name) {
    std::vector<KeyValue> out;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                         ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        KeyValue kv;
        kv.section = section;
        kv.key = trim(line.substr(0, eq));
        kv.value = trim(line.substr(eq + 1));
        kv.line = lineno;
        if (kv.key.empty())
            throw std::runtime_error(name + ":" + std::to_string(lineno) + ": empty key");
        out.push_back(std::move(kv));
    }
    return out;
}

std::vector<std::string> split_list(const std::string& csv_list) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv_list) {
        if (c == ',') {
            cur = trim(cur);
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double to_double(const KeyValue& kv, const std::string& name) {
    try {
        std::size_t pos = 0;
        double v = std::stod(kv.value, &pos);
        if (pos != kv.value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::runtime_error(name + ":" + std::to_string(kv.line) + ": '" + kv.key +
                                 "' must be a number, got '" + kv.value + "'");
    }
}

int to_int(const KeyValue& kv, const std::string& name) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(kv.value, &pos);
        if (pos != kv.value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::runtime_error(name + ":" + std::to_string(kv.line) + ": '" + kv.key +
                                 "' must be an integer, got '" + kv.value + "'");
    }
}

}  // namespace stochfrac
