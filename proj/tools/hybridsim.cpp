#include "hybridsim/artifacts.hpp"
#include "hybridsim/config.hpp"
#include "hybridsim/scenario.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace hybridsim;

namespace {

struct RunOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> until_min;
    std::optional<std::string> scheduler;
    std::vector<double> snapshots_min;
};

void apply_overrides(ScenarioConfig& config, const RunOptions& options) {
    if (options.seed) config.seed = *options.seed;
    if (options.until_min) config.t_end = *options.until_min * kSecondsPerMinute;
    if (options.scheduler) {
        const auto mode = parse_scheduler_mode(*options.scheduler);
        if (!mode) throw ConfigError(0, "--scheduler", "unknown scheduler '" + *options.scheduler + "'");
        config.scheduler = *mode;
    }
    if (!options.snapshots_min.empty()) {
        config.snapshot_times.clear();
        for (double m : options.snapshots_min) config.snapshot_times.push_back(m * kSecondsPerMinute);
    }
    // Drop default snapshots that a shorter --until leaves behind.
    std::erase_if(config.snapshot_times, [&](SimTime t) { return t > config.t_end && options.snapshots_min.empty(); });
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, "", e.what());
    }
}

int execute(const ScenarioConfig& config, const std::string& out_dir) {
    const auto result = run_scenario(config);
    write_run_artifacts(result, config.scheduler, out_dir);
    std::cout << to_string(config.kind) << ": " << result.log.records().size() << " log records, "
              << result.stats.events_executed << " events executed, " << result.stats.queue_insertions
              << " queue insertions -> " << out_dir << "\n";
    return 0;
}

void add_common_options(CLI::App* cmd, RunOptions& options) {
    cmd->add_option("--seed", options.seed, "Override the random seed");
    cmd->add_option("--until", options.until_min, "Override the end time (minutes)");
    cmd->add_option("--scheduler", options.scheduler, "event-stepped | lookahead");
    cmd->add_option("--snapshots", options.snapshots_min, "Heater snapshot times (minutes)")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid discrete-continuous simulation engine"};
    app.require_subcommand(1);

    RunOptions run_options;
    auto* run = app.add_subcommand("run", "Run a scenario config file");
    run->add_option("config", run_options.config_path, "Scenario config (.toml)")->required();
    run->add_option("--out-dir", run_options.out_dir, "Output directory")->default_val("out");
    add_common_options(run, run_options);

    RunOptions demo_options;
    std::string demo_name;
    auto* demo = app.add_subcommand("demo", "Run a built-in validation scenario");
    demo->add_option("name", demo_name, "heater | tank | system")->required();
    demo->add_option("--out-dir", demo_options.out_dir, "Output directory (default out/<name>)");
    add_common_options(demo, demo_options);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto config = load_scenario_config(run_options.config_path);
            apply_overrides(config, run_options);
            return execute(config, run_options.out_dir);
        }
        const auto kind = parse_scenario_kind(demo_name);
        if (!kind) {
            std::cerr << "unknown demo '" << demo_name << "'\n" << demo->help();
            return 2;
        }
        auto config = demo_config(*kind);
        apply_overrides(config, demo_options);
        const std::string out_dir = demo_options.out_dir.empty() ? "out/" + demo_name : demo_options.out_dir;
        return execute(config, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalDivergence& e) {
        std::cerr << "simulation failed: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
