#include "hybridsim/scenario.hpp"

#include "hybridsim/lookahead.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace hybridsim {

std::string_view to_string(SchedulerMode mode) noexcept {
    return mode == SchedulerMode::Lookahead ? "lookahead" : "event-stepped";
}

std::string_view to_string(ScenarioKind kind) noexcept {
    switch (kind) {
        case ScenarioKind::System: return "system";
        case ScenarioKind::Heater: return "heater";
        case ScenarioKind::Tank: return "tank";
    }
    return "unknown";
}

std::optional<SchedulerMode> parse_scheduler_mode(std::string_view text) noexcept {
    if (text == "event-stepped") return SchedulerMode::EventStepped;
    if (text == "lookahead") return SchedulerMode::Lookahead;
    return std::nullopt;
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) noexcept {
    if (text == "system") return ScenarioKind::System;
    if (text == "heater") return ScenarioKind::Heater;
    if (text == "tank") return ScenarioKind::Tank;
    return std::nullopt;
}

std::string_view to_string(ControllerPhase phase) noexcept {
    switch (phase) {
        case ControllerPhase::Idle: return "Idle";
        case ControllerPhase::Warming: return "Warming";
        case ControllerPhase::Processing: return "Processing";
        case ControllerPhase::Refilling: return "Refilling";
    }
    return "Unknown";
}

namespace {

void check_range(const UniformMinutes& range, const char* what) {
    if (!std::isfinite(range.lo) || !std::isfinite(range.hi) || range.lo < 0.0 || range.hi < range.lo ||
        range.hi <= 0.0) {
        throw std::invalid_argument(std::string(what) + " needs 0 <= lo <= hi and hi > 0");
    }
}

}  // namespace

void ScenarioConfig::validate() const {
    heater.validate();
    tank.validate();
    if (!(initial_level >= 0.0 && initial_level <= tank.max_level)) {
        throw std::invalid_argument("initial tank level outside [0, max_level]");
    }
    if (!(ready_threshold > heater.low_temp && ready_threshold < heater.high_temp)) {
        throw std::invalid_argument("ready threshold must lie strictly between low_temp and high_temp");
    }
    if (kind == ScenarioKind::System &&
        std::find(heater.thresholds.begin(), heater.thresholds.end(), ready_threshold) == heater.thresholds.end()) {
        throw std::invalid_argument("ready threshold must be one of the heater thresholds");
    }
    check_range(job_duration, "job duration");
    check_range(job_interarrival, "job interarrival");
    check_range(heater_schedule.random_interval, "heater random interval");
    check_range(valve_toggle_interval, "valve toggle interval");
    if (heater_schedule.cycles < 0) throw std::invalid_argument("heater schedule cycles must be >= 0");
    if (!(heater_schedule.on_duration_min >= 0.0 && heater_schedule.on_duration_min <= heater_schedule.cycle_period_min)) {
        throw std::invalid_argument("heater on duration must lie within the cycle period");
    }
    if (!std::isfinite(t_end) || t_end < 0.0) throw std::invalid_argument("t_end must be finite and >= 0");
    for (SimTime t : snapshot_times) {
        if (!(t >= 0.0 && t <= t_end)) throw std::invalid_argument("snapshot time outside [0, t_end]");
    }
}

ScenarioConfig demo_config(ScenarioKind kind) {
    ScenarioConfig config;
    config.kind = kind;
    config.seed = 7;
    switch (kind) {
        case ScenarioKind::System:
            config.t_end = 120.0 * kSecondsPerMinute;
            break;
        case ScenarioKind::Heater:
            config.t_end = 120.0 * kSecondsPerMinute;
            config.snapshot_times = {stable_dt(config.heater), 5.0 * kSecondsPerMinute, 15.0 * kSecondsPerMinute,
                                     20.0 * kSecondsPerMinute};
            break;
        case ScenarioKind::Tank:
            config.t_end = 60.0 * kSecondsPerMinute;
            config.tank = TankParams{1.0, 0.2 / kSecondsPerMinute, 0.25 / kSecondsPerMinute};
            config.initial_level = 0.5;
            break;
    }
    return config;
}

std::vector<EventLogRecord> generated_events(const EventLog& log) {
    std::vector<EventLogRecord> out;
    for (const auto& record : log.records()) {
        if (record.kind == "Generated") out.push_back(record);
    }
    return out;
}

namespace {

std::string seconds_text(double seconds) { return format_real(seconds); }

class Simulation {
public:
    Simulation(const ScenarioConfig& config, const RunHooks& hooks)
        : config_(config), hooks_(hooks), rng_(config.seed) {
        config_.validate();
        engine_.set_trace([this](SimTime t, std::string_view source, std::string_view kind, std::string_view detail) {
            result_.log.append({t, std::string(source), std::string(kind), std::string(detail)});
        });
        const auto delivery =
            config_.scheduler == SchedulerMode::Lookahead ? WakeupDelivery::External : WakeupDelivery::Queue;
        if (config_.kind != ScenarioKind::Tank) {
            heater_.emplace("heater", config_.heater);
            heater_port_ = std::make_unique<EntityPort>(engine_, *heater_, delivery);
            heater_port_->on_activation([this](const ContinuousEntity&, EventKind) {
                result_.probe_series.append(heater_->last_update_time(),
                                            {heater_->probe_value(), heater_->heater_on() ? 1.0 : 0.0});
                if (hooks_.after_heater_update) hooks_.after_heater_update(*heater_);
            });
        }
        if (config_.kind != ScenarioKind::Heater) {
            tank_.emplace("tank", config_.tank, config_.initial_level);
            tank_port_ = std::make_unique<EntityPort>(engine_, *tank_, delivery);
            tank_port_->on_activation([this](const ContinuousEntity&, EventKind) {
                result_.tank_series.append(tank_->last_update_time(),
                                           {tank_->level(), tank_->inlet_open() ? 1.0 : 0.0,
                                            tank_->outlet_open() ? 1.0 : 0.0});
                if (hooks_.after_tank_update) hooks_.after_tank_update(*tank_);
            });
        }
    }

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    RunResult run() {
        const auto wall_start = std::chrono::steady_clock::now();

        schedule_snapshots();
        switch (config_.kind) {
            case ScenarioKind::System:
                engine_.spawn(controller(), "controller");
                engine_.spawn(job_source(), "jobs");
                break;
            case ScenarioKind::Heater:
                schedule_heater_cycles();
                engine_.spawn(heater_random_schedule(), "heater_schedule");
                break;
            case ScenarioKind::Tank:
                engine_.spawn(valve_toggler(), "valve_toggler");
                break;
        }

        std::vector<EntityPort*> ports;
        if (heater_port_) ports.push_back(heater_port_.get());
        if (tank_port_) ports.push_back(tank_port_.get());
        for (auto* port : ports) port->start();

        if (config_.scheduler == SchedulerMode::Lookahead) {
            LookaheadScheduler scheduler(engine_, ports);
            scheduler.run_until(config_.t_end);
            result_.stats.iterations = scheduler.stats().iterations;
            result_.stats.peeks = scheduler.stats().peeks;
            result_.stats.rollbacks = scheduler.stats().rollbacks;
        } else {
            engine_.run_until(config_.t_end);
        }

        result_.stats.events_executed = engine_.stats().events_executed;
        result_.stats.queue_insertions = engine_.stats().queue_insertions;
        result_.stats.sim_time_s = engine_.now();
        for (auto* port : ports) result_.stats.stale_wakeups += port->stale_wakeups();
        if (heater_) result_.final_heater = *heater_;
        if (tank_) result_.final_tank = *tank_;
        result_.stats.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
        return std::move(result_);
    }

private:
    SimTime minutes(double m) const { return m * kSecondsPerMinute; }

    void set_phase(ControllerPhase phase) {
        phase_ = phase;
        engine_.trace("controller", "Process", "phase=" + std::string(to_string(phase)));
    }

    void set_heater_power(bool on) {
        heater_port_->perturb(on ? "power on" : "power off", [this, on] { heater_->set_power(on); });
    }

    void set_valve(Valve valve, bool open) {
        const std::string detail = std::string(open ? "open " : "close ") + std::string(to_string(valve));
        tank_port_->perturb(detail, [this, valve, open] { tank_->set_valve(valve, open); });
    }

    void schedule_snapshots() {
        if (!heater_port_) return;
        for (SimTime t : config_.snapshot_times) {
            engine_.schedule_at(EventKind::Probe, Payload{"heater", "snapshot"}, t, [this](Engine& engine, const Event&) {
                heater_port_->probe();
                result_.snapshots.push_back({engine.now(), heater_->grid()});
            });
        }
    }

    void schedule_heater_cycles() {
        const auto& schedule = config_.heater_schedule;
        for (int k = 0; k < schedule.cycles; ++k) {
            const SimTime on_at = minutes(k * schedule.cycle_period_min);
            const SimTime off_at = on_at + minutes(schedule.on_duration_min);
            engine_.schedule_at(EventKind::Perturbation, Payload{"heater", "power on"}, on_at,
                                [this](Engine&, const Event&) { set_heater_power(true); });
            engine_.schedule_at(EventKind::Perturbation, Payload{"heater", "power off"}, off_at,
                                [this](Engine&, const Event&) { set_heater_power(false); });
        }
    }

    // Power toggles after random intervals once the fixed cycles are over,
    // starting with the coil switched on.
    Process heater_random_schedule() {
        const auto& schedule = config_.heater_schedule;
        const SimTime start = minutes(schedule.cycles * schedule.cycle_period_min);
        if (start > config_.t_end) co_return;
        co_await engine_.timeout(start);
        bool on = true;
        while (true) {
            set_heater_power(on);
            on = !on;
            co_await engine_.timeout(minutes(rng_.uniform(schedule.random_interval)));
        }
    }

    Process valve_toggler() {
        while (true) {
            co_await engine_.timeout(minutes(rng_.uniform(config_.valve_toggle_interval)));
            const Valve valve = rng_.uniform01() < 0.5 ? Valve::Inlet : Valve::Outlet;
            const bool open = valve == Valve::Inlet ? !tank_->inlet_open() : !tank_->outlet_open();
            set_valve(valve, open);
        }
    }

    Process controller() {
        const std::string ready_tag = Heater::crossing_tag(config_.ready_threshold, Direction::Rising);
        set_phase(ControllerPhase::Idle);
        while (true) {
            set_heater_power(true);
            set_phase(ControllerPhase::Warming);
            // Crossings are edge-triggered: check the level before waiting for one.
            if (heater_port_->probe() < config_.ready_threshold) co_await heater_port_->signal(ready_tag);
            set_phase(ControllerPhase::Processing);
            processing_started_.trigger(engine_);

            co_await tank_port_->signal(Tank::kEmpty);
            if (job_active_) abort_job_.trigger(engine_);
            if (tank_->outlet_open()) set_valve(Valve::Outlet, false);
            set_heater_power(false);
            set_valve(Valve::Inlet, true);
            set_phase(ControllerPhase::Refilling);

            co_await tank_port_->signal(Tank::kFull);
            set_valve(Valve::Inlet, false);
        }
    }

    // Jobs arrive one at a time and only while the controller is processing.
    Process job_source() {
        std::uint64_t job_id = 0;
        while (true) {
            if (phase_ != ControllerPhase::Processing) co_await processing_started_;
            const SimTime gap = minutes(rng_.uniform(config_.job_interarrival));
            co_await engine_.timeout(gap);
            if (phase_ != ControllerPhase::Processing) continue;

            const SimTime duration = minutes(rng_.uniform(config_.job_duration));
            ++job_id;
            job_active_ = true;
            engine_.trace("jobs", "Process",
                          "job_start id=" + std::to_string(job_id) + " interarrival_s=" + seconds_text(gap) +
                              " duration_s=" + seconds_text(duration));
            set_valve(Valve::Outlet, true);
            const auto outcome = co_await engine_.first_of(duration, abort_job_);
            job_active_ = false;
            if (outcome == WaitOutcome::Timeout) {
                set_valve(Valve::Outlet, false);
                engine_.trace("jobs", "Process", "job_end id=" + std::to_string(job_id));
            } else {
                engine_.trace("jobs", "Process", "job_aborted id=" + std::to_string(job_id));
            }
        }
    }

    ScenarioConfig config_;
    RunHooks hooks_;
    RunResult result_;
    ScenarioRng rng_;
    Engine engine_;
    std::optional<Heater> heater_;
    std::optional<Tank> tank_;
    std::unique_ptr<EntityPort> heater_port_;
    std::unique_ptr<EntityPort> tank_port_;
    ControllerPhase phase_ = ControllerPhase::Idle;
    Signal processing_started_{"controller:processing"};
    Signal abort_job_{"controller:abort"};
    bool job_active_ = false;
};

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const RunHooks& hooks) {
    Simulation simulation(config, hooks);
    return simulation.run();
}

}  // namespace hybridsim
