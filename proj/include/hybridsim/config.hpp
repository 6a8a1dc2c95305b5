#pragma once

#include "hybridsim/scenario.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hybridsim {

/// Configuration problem, located by line (0 when unknown) and field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, std::string field, const std::string& message);

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

/// Parsed value of a config key: number, boolean, string or number array.
struct ConfigValue {
    std::variant<double, bool, std::string, std::vector<double>> data;
    int line = 0;
};

/// Sections of `key = value` pairs. Accepts the subset of TOML the scenario
/// schema needs: [section] headers, # comments, numbers, true/false,
/// "strings" and single-line [1, 2, 3] arrays.
class ConfigDocument {
public:
    static ConfigDocument parse(std::string_view text);

    const ConfigValue* find(const std::string& section, const std::string& key) const;
    const std::map<std::string, std::map<std::string, ConfigValue>>& sections() const noexcept { return sections_; }

private:
    std::map<std::string, std::map<std::string, ConfigValue>> sections_;
};

/// Builds a validated scenario from a config document.
///
/// Schema (all times in minutes):
///   [run]      scenario ("system" | "heater" | "tank", required), t_end_min (required),
///              seed, scheduler ("event-stepped" | "lookahead"), snapshots
///   [heater]   alpha, n, high_temp, low_temp, probe = [i, j], thresholds
///   [tank]     max_level, inflow_rate_per_min, outflow_rate_per_min, initial_level
///   [jobs]     duration_min, duration_max, interarrival_min, interarrival_max, ready_threshold
///   [schedule] cycle_period_min, on_duration_min, cycles, random_min, random_max,
///              valve_toggle_min, valve_toggle_max
ScenarioConfig scenario_from_document(const ConfigDocument& document);
ScenarioConfig parse_scenario_config(std::string_view text);
ScenarioConfig load_scenario_config(const std::string& path);

/// Writes a config in the same schema; parsing it back yields the same scenario.
std::string serialize_scenario_config(const ScenarioConfig& config);

}  // namespace hybridsim
