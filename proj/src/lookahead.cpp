#include "hybridsim/lookahead.hpp"

#include <algorithm>
#include <stdexcept>

namespace hybridsim {

PeekableEntity::PeekableEntity(EntityPort& port) : port_(&port) {
    if (port.delivery() != WakeupDelivery::External) {
        throw std::invalid_argument("peek-ahead needs a port with externally driven wakeups");
    }
}

PeekResult PeekableEntity::peek(SimTime horizon) {
    tentative_ = port_->entity().clone();
    PeekResult result{std::nullopt, horizon};
    while (auto next = next_self_activation(*tentative_)) {
        if (*next > horizon) break;
        auto emissions = tentative_->update_to(*next);
        if (!emissions.empty()) {
            result.earliest_event = Prediction{*next, emissions.front().detail};
            result.horizon_reached = *next;
            break;
        }
    }
    return result;
}

void PeekableEntity::commit(SimTime t) {
    tentative_.reset();
    while (auto next = port_->next_wakeup()) {
        if (*next > t) break;
        port_->self_activate(*next);
    }
}

LookaheadScheduler::LookaheadScheduler(Engine& engine, std::vector<EntityPort*> ports) : engine_(&engine) {
    entities_.reserve(ports.size());
    for (auto* port : ports) entities_.emplace_back(*port);
}

SimTime LookaheadScheduler::tentative_step(SimTime t_end) const {
    const auto next = engine_->next_event_time();
    const SimTime horizon = next ? std::min(*next, t_end) : t_end;
    return std::max(0.0, horizon - engine_->now());
}

bool LookaheadScheduler::finished(SimTime t_end) const {
    const auto next = engine_->next_event_time();
    return engine_->now() >= t_end && (!next || *next > t_end);
}

SimTime LookaheadScheduler::advance_iteration(SimTime t_end) {
    ++stats_.iterations;
    const SimTime now = engine_->now();

    // Self-activations already due at the current clock run before any event.
    for (auto& entity : entities_) entity.commit(now);

    const SimTime delta = tentative_step(t_end);
    if (delta == 0.0) {
        if (auto next = engine_->next_event_time(); next && *next <= t_end) engine_->step();
        return engine_->now();
    }

    const SimTime horizon = now + delta;
    std::vector<PeekResult> results;
    results.reserve(entities_.size());
    try {
        for (auto& entity : entities_) {
            ++stats_.peeks;
            results.push_back(entity.peek(horizon));
        }
    } catch (...) {
        for (auto& entity : entities_) entity.discard();
        throw;
    }

    SimTime target = horizon;
    for (const auto& result : results) {
        if (result.earliest_event) target = std::min(target, result.earliest_event->time);
    }
    for (std::size_t k = 0; k < entities_.size(); ++k) {
        if (results[k].horizon_reached > target) ++stats_.rollbacks;
    }

    engine_->advance_clock(target);
    for (auto& entity : entities_) entity.commit(target);
    return engine_->now();
}

SimTime LookaheadScheduler::run_until(SimTime t_end) {
    if (!(t_end >= engine_->now())) throw std::invalid_argument("run_until target lies before the current clock");
    while (!finished(t_end)) advance_iteration(t_end);
    for (auto& entity : entities_) entity.commit(engine_->now());
    return engine_->now();
}

}  // namespace hybridsim
