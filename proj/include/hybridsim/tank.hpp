#pragma once

#include "hybridsim/continuous.hpp"

namespace hybridsim {

/// Rates are in meters per second.
struct TankParams {
    double max_level = 1.0;
    double inflow_rate = 0.0;
    double outflow_rate = 0.0;

    void validate() const;
};

enum class Valve : std::uint8_t { Inlet, Outlet };

std::string_view to_string(Valve valve) noexcept;

/// inflow·[inlet open] − outflow·[outlet open]
double net_rate(const TankParams& params, bool inlet_open, bool outlet_open) noexcept;

/// Fluid tank with linear level dynamics.
///
/// The level follows a straight line between valve changes, clamped to
/// [0, max_level]. The line is anchored at the last valve change, so the level
/// at any instant is a function of that anchor alone and intermediate updates
/// cannot accumulate drift. Arrival at either boundary emits `tank_empty` or
/// `tank_full` once; wakeups are predictive.
class Tank final : public ContinuousEntity {
public:
    static constexpr const char* kEmpty = "tank_empty";
    static constexpr const char* kFull = "tank_full";

    Tank(std::string name, TankParams params, double initial_level, SimTime t0 = 0.0);

    SimTime last_update_time() const override { return last_update_; }
    WakeupPolicy wakeup_policy() const override { return Predictive{}; }
    std::vector<Emission> update_to(SimTime t) override;
    std::optional<Prediction> predict_next_event() const override;
    double probe_value() const override { return level_; }
    std::uint64_t state_hash() const override;
    std::unique_ptr<ContinuousEntity> clone() const override { return std::make_unique<Tank>(*this); }

    /// Changes a valve at last_update_time. Bring the tank up to the clock first.
    void set_valve(Valve valve, bool open);

    const TankParams& params() const noexcept { return params_; }
    double level() const noexcept { return level_; }
    bool inlet_open() const noexcept { return inlet_open_; }
    bool outlet_open() const noexcept { return outlet_open_; }
    double net_rate() const noexcept { return hybridsim::net_rate(params_, inlet_open_, outlet_open_); }

    /// Level on the current trajectory at time t >= anchor time.
    double level_at(SimTime t) const noexcept;

private:
    std::optional<SimTime> boundary_arrival() const noexcept;

    TankParams params_;
    double level_;
    bool inlet_open_ = false;
    bool outlet_open_ = false;
    SimTime last_update_;
    SimTime anchor_time_;
    double anchor_level_;
};

}  // namespace hybridsim
