#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlin {

/// Parse failure with the offending 1-based line number.
class config_error : public std::runtime_error {
public:
    config_error(int line, const std::string& msg)
        : std::runtime_error("config line " + std::to_string(line) + ": " + msg), line_(line) {}
    explicit config_error(const std::string& msg) : std::runtime_error(msg), line_(0) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Flat "key = value" text configuration.  Parsing is strict: malformed
/// lines fail with their line number, and experiments reject unknown keys
/// and missing required keys by name.  serialize() re-emits the canonical
/// form ("key = value\n", original order), so canonical files round-trip
/// byte-identically.
class ExperimentConfig {
public:
    static ExperimentConfig parse_string(const std::string& text);
    static ExperimentConfig parse_file(const std::string& path);

    std::string serialize() const;

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    const std::string& get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    long get_long(const std::string& key) const;
    long get_long_or(const std::string& key, long fallback) const;
    std::vector<long> get_long_list(const std::string& key) const;  // comma-separated
    std::vector<long> get_long_list_or(const std::string& key, std::vector<long> fallback) const;

    /// Unknown key -> config_error naming it; missing required -> config_error.
    void check_keys(std::span<const std::string> required,
                    std::span<const std::string> optional) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// MLINBOUND_WORKERS fallback, else 1; explicit positive request wins.
int resolve_workers(int requested = 0);

} // namespace mlin
