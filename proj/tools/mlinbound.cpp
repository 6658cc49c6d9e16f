// Batch experiment driver.  One process runs one experiment; composition is
// left to the shell.  Exit status: 0 all checks passed, 1 a check failed,
// 2 configuration problem.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "mlin/config.hpp"
#include "mlin/experiments.hpp"

namespace {

void print_result(const mlin::ExperimentResult& r) {
    std::printf("experiment %s (seed %llu, %.2fs)\n", r.experiment.c_str(),
                static_cast<unsigned long long>(r.seed), r.wall_seconds);
    for (const auto& c : r.checks) {
        std::printf("  [%s] %-32s measured %.6g %s %.6g\n", c.pass ? "pass" : "FAIL",
                    c.name.c_str(), c.measured, c.relation.c_str(), c.threshold);
    }
    for (const auto& a : r.artifacts) std::printf("  wrote %s\n", a.c_str());
    std::printf("%s\n", r.pass ? "PASS" : "FAIL");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale experiments for multilinear multiplier bounds"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    unsigned long long seed = 1;
    int workers = 0;

    for (const auto& name : mlin::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "key = value configuration file")->required();
        sub->add_option("--seed", seed, "random seed (default 1)");
        sub->add_option("--out", out_dir, "directory for CSV/JSON artifacts");
        sub->add_option("--workers", workers,
                        "worker threads (default: MLINBOUND_WORKERS or 1)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string experiment = app.get_subcommands().front()->get_name();

    try {
        mlin::ExperimentConfig cfg = mlin::ExperimentConfig::parse_file(config_path);
        mlin::RunOptions opt;
        opt.seed = seed;
        opt.out_dir = out_dir;
        opt.workers = mlin::resolve_workers(workers);
        mlin::ExperimentResult r = mlin::run_experiment(experiment, cfg, opt);
        print_result(r);
        return r.pass ? 0 : 1;
    } catch (const mlin::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
