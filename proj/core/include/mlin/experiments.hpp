#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlin/config.hpp"

namespace mlin {

struct CheckRecord {
    std::string name;
    double measured = 0;
    double threshold = 0;
    std::string relation;  // "<=" or ">="
    bool pass = false;
};

struct RunOptions {
    std::uint64_t seed = 1;
    std::string out_dir;  // artifacts are skipped when empty
    int workers = 1;
};

struct ExperimentResult {
    std::string experiment;
    std::string traceability;  // the inequality or identity the run exercises
    std::vector<CheckRecord> checks;
    bool pass = true;
    double wall_seconds = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> artifacts;
};

std::vector<std::string> experiment_names();

/// Runs one named experiment; throws config_error for bad configs.
ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg,
                                const RunOptions& opt);

std::string result_json(const ExperimentResult& r);

} // namespace mlin
