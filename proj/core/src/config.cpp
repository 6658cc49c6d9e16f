#include "mlin/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace mlin {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) throw config_error(lineno, "expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw config_error(lineno, "empty key");
        if (value.empty()) throw config_error(lineno, "empty value for key '" + key + "'");
        for (const auto& [k, v] : cfg.entries_)
            if (k == key) throw config_error(lineno, "duplicate key '" + key + "'");
        cfg.entries_.emplace_back(key, value);
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str());
}

std::string ExperimentConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

bool ExperimentConfig::has(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return true;
    return false;
}

const std::string& ExperimentConfig::get(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    throw config_error("missing required key '" + key + "'");
}

const std::string& ExperimentConfig::get_or(const std::string& key,
                                            const std::string& fallback) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    return fallback;
}

double ExperimentConfig::get_double(const std::string& key) const {
    const std::string& v = get(key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': not a number: " + v);
    }
}

double ExperimentConfig::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long ExperimentConfig::get_long(const std::string& key) const {
    const std::string& v = get(key);
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': not an integer: " + v);
    }
}

long ExperimentConfig::get_long_or(const std::string& key, long fallback) const {
    return has(key) ? get_long(key) : fallback;
}

std::vector<long> ExperimentConfig::get_long_list(const std::string& key) const {
    const std::string& v = get(key);
    std::vector<long> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        try {
            std::size_t pos = 0;
            out.push_back(std::stol(t, &pos));
            if (pos != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            throw config_error("key '" + key + "': not an integer list: " + v);
        }
    }
    if (out.empty()) throw config_error("key '" + key + "': empty list");
    return out;
}

std::vector<long> ExperimentConfig::get_long_list_or(const std::string& key,
                                                     std::vector<long> fallback) const {
    return has(key) ? get_long_list(key) : fallback;
}

void ExperimentConfig::check_keys(std::span<const std::string> required,
                                  std::span<const std::string> optional) const {
    for (const auto& [k, v] : entries_) {
        if (k == "experiment") continue;  // verified against the CLI selection
        const bool known = std::find(required.begin(), required.end(), k) != required.end() ||
                           std::find(optional.begin(), optional.end(), k) != optional.end();
        if (!known) throw config_error("unknown key '" + k + "'");
    }
    for (const auto& k : required) {
        if (!has(k)) throw config_error("missing required key '" + k + "'");
    }
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MLINBOUND_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    return 1;
}

} // namespace mlin
