#include "hybridsim/tank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridsim {

void TankParams::validate() const {
    if (!std::isfinite(max_level) || max_level <= 0.0) throw std::invalid_argument("tank max_level must be > 0");
    if (!std::isfinite(inflow_rate) || inflow_rate < 0.0) throw std::invalid_argument("tank inflow rate must be >= 0");
    if (!std::isfinite(outflow_rate) || outflow_rate < 0.0) {
        throw std::invalid_argument("tank outflow rate must be >= 0");
    }
}

std::string_view to_string(Valve valve) noexcept { return valve == Valve::Inlet ? "inlet" : "outlet"; }

double net_rate(const TankParams& params, bool inlet_open, bool outlet_open) noexcept {
    return (inlet_open ? params.inflow_rate : 0.0) - (outlet_open ? params.outflow_rate : 0.0);
}

Tank::Tank(std::string name, TankParams params, double initial_level, SimTime t0)
    : ContinuousEntity(std::move(name)),
      params_(params),
      level_(initial_level),
      last_update_(t0),
      anchor_time_(t0),
      anchor_level_(initial_level) {
    params_.validate();
    if (!(initial_level >= 0.0 && initial_level <= params_.max_level)) {
        throw std::invalid_argument("initial tank level outside [0, max_level]");
    }
}

std::optional<SimTime> Tank::boundary_arrival() const noexcept {
    const double rate = net_rate();
    if (rate < 0.0 && anchor_level_ > 0.0) return anchor_time_ + anchor_level_ / -rate;
    if (rate > 0.0 && anchor_level_ < params_.max_level) {
        return anchor_time_ + (params_.max_level - anchor_level_) / rate;
    }
    return std::nullopt;
}

double Tank::level_at(SimTime t) const noexcept {
    const double rate = net_rate();
    if (rate == 0.0) return anchor_level_;
    // Snap to the boundary from the predicted arrival onwards so a wakeup at
    // exactly that instant sees the boundary despite round-off.
    if (auto arrival = boundary_arrival(); arrival && t >= *arrival) {
        return rate < 0.0 ? 0.0 : params_.max_level;
    }
    return std::clamp(anchor_level_ + rate * (t - anchor_time_), 0.0, params_.max_level);
}

std::vector<Emission> Tank::update_to(SimTime t) {
    if (!(t >= last_update_)) throw std::invalid_argument("tank update_to called with a time in the past");
    const double previous = level_;
    level_ = level_at(t);
    last_update_ = t;

    std::vector<Emission> out;
    if (previous > 0.0 && level_ == 0.0) out.push_back({kEmpty, kEmpty, t});
    if (previous < params_.max_level && level_ == params_.max_level) out.push_back({kFull, kFull, t});
    return out;
}

std::optional<Prediction> Tank::predict_next_event() const {
    if (level_ == 0.0 && net_rate() <= 0.0) return std::nullopt;
    if (level_ == params_.max_level && net_rate() >= 0.0) return std::nullopt;
    auto arrival = boundary_arrival();
    if (!arrival) return std::nullopt;
    return Prediction{*arrival, net_rate() < 0.0 ? kEmpty : kFull};
}

void Tank::set_valve(Valve valve, bool open) {
    bool& slot = valve == Valve::Inlet ? inlet_open_ : outlet_open_;
    if (slot == open) return;
    slot = open;
    anchor_time_ = last_update_;
    anchor_level_ = level_;
}

std::uint64_t Tank::state_hash() const {
    return StateHasher{}
        .add(level_)
        .add(inlet_open_)
        .add(outlet_open_)
        .add(last_update_)
        .add(anchor_time_)
        .add(anchor_level_)
        .value();
}

}  // namespace hybridsim
