#pragma once

#include "hybridsim/heater.hpp"
#include "hybridsim/kernel.hpp"
#include "hybridsim/recorder.hpp"
#include "hybridsim/tank.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hybridsim {

enum class SchedulerMode : std::uint8_t { EventStepped, Lookahead };
enum class ScenarioKind : std::uint8_t { System, Heater, Tank };

std::string_view to_string(SchedulerMode mode) noexcept;
std::string_view to_string(ScenarioKind kind) noexcept;
std::optional<SchedulerMode> parse_scheduler_mode(std::string_view text) noexcept;
std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) noexcept;

inline constexpr double kSecondsPerMinute = 60.0;

/// Closed interval for uniform draws, in minutes.
struct UniformMinutes {
    double lo = 0.5;
    double hi = 1.0;
    bool operator==(const UniformMinutes&) const = default;
};

/// Heating schedule of the heater validation run: `cycles` identical
/// ON/OFF cycles, then power toggles after random intervals.
struct HeaterSchedule {
    double cycle_period_min = 25.0;
    double on_duration_min = 12.5;
    int cycles = 2;
    UniformMinutes random_interval{2.5, 10.0};
    bool operator==(const HeaterSchedule&) const = default;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::System;
    HeaterParams heater;
    TankParams tank{1.0, 0.2 / kSecondsPerMinute, 0.1 / kSecondsPerMinute};
    double initial_level = 1.0;
    double ready_threshold = 50.0;
    UniformMinutes job_duration{0.5, 1.0};
    UniformMinutes job_interarrival{0.5, 1.0};
    HeaterSchedule heater_schedule;
    UniformMinutes valve_toggle_interval{1.0, 5.0};
    std::uint64_t seed = 1;
    SimTime t_end = 120.0 * kSecondsPerMinute;
    SchedulerMode scheduler = SchedulerMode::EventStepped;
    std::vector<SimTime> snapshot_times;  // seconds

    void validate() const;
};

/// Built-in configurations behind `hybridsim demo`.
ScenarioConfig demo_config(ScenarioKind kind);

/// Seeded generator for all scenario randomness: mt19937_64 with uniform
/// reals built from the top 53 bits, so draws do not depend on the standard
/// library's distribution implementation.
class ScenarioRng {
public:
    explicit ScenarioRng(std::uint64_t seed) : engine_(seed) {}
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double uniform(const UniformMinutes& range) { return uniform(range.lo, range.hi); }

private:
    std::mt19937_64 engine_;
};

struct GridSnapshot {
    SimTime time = 0.0;
    Grid grid;
};

struct RunStats {
    std::uint64_t events_executed = 0;
    std::uint64_t queue_insertions = 0;
    double wall_time_s = 0.0;
    SimTime sim_time_s = 0.0;
    std::uint64_t iterations = 0;
    std::uint64_t peeks = 0;
    std::uint64_t rollbacks = 0;
    std::uint64_t stale_wakeups = 0;
};

enum class ControllerPhase : std::uint8_t { Idle, Warming, Processing, Refilling };
std::string_view to_string(ControllerPhase phase) noexcept;

struct RunResult {
    EventLog log;
    TimeSeries tank_series{{"level_m", "inlet_open", "outlet_open"}};
    TimeSeries probe_series{{"probe_temp_C", "heater_on"}};
    std::vector<GridSnapshot> snapshots;
    RunStats stats;
    std::optional<Heater> final_heater;
    std::optional<Tank> final_tank;
};

/// Optional observation points; called synchronously during the run.
struct RunHooks {
    std::function<void(const Heater&)> after_heater_update;
    std::function<void(const Tank&)> after_tank_update;
};

RunResult run_scenario(const ScenarioConfig& config, const RunHooks& hooks = {});

/// The Generated records of a log, in order.
std::vector<EventLogRecord> generated_events(const EventLog& log);

}  // namespace hybridsim
