#include "hybridsim/continuous.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hybridsim {

WakeupPolicy make_fixed_step(SimTime dt) {
    if (!std::isfinite(dt) || dt <= 0.0) throw std::invalid_argument("fixed step must be finite and positive");
    return FixedStep{dt};
}

std::optional<SimTime> next_self_activation(const ContinuousEntity& entity) {
    const auto policy = entity.wakeup_policy();
    if (const auto* fixed = std::get_if<FixedStep>(&policy)) return entity.last_update_time() + fixed->dt;
    if (auto prediction = entity.predict_next_event()) return prediction->time;
    return std::nullopt;
}

StateHasher& StateHasher::add_bytes(const void* data, std::size_t size) noexcept {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < size; ++k) {
        hash_ ^= bytes[k];
        hash_ *= 1099511628211ull;
    }
    return *this;
}

EntityPort::EntityPort(Engine& engine, ContinuousEntity& entity, WakeupDelivery delivery)
    : engine_(&engine), entity_(&entity), delivery_(delivery) {}

void EntityPort::start() { reschedule_wakeup(); }

double EntityPort::probe() {
    activate(EventKind::Probe);
    return entity_->probe_value();
}

void EntityPort::activate(EventKind cause) {
    publish(entity_->update_to(engine_->now()));
    if (cause == EventKind::Probe) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "value=%.6f", entity_->probe_value());
        engine_->trace(entity_->name(), "Probe", buf);
    }
    finish_activation(cause);
}

void EntityPort::self_activate(SimTime t) {
    auto emissions = entity_->update_to(t);
    if (!emissions.empty() && t != engine_->now()) {
        throw std::logic_error("entity '" + entity_->name() + "' produced outputs away from the clock");
    }
    publish(emissions);
    finish_activation(EventKind::Wakeup);
}

void EntityPort::publish(const std::vector<Emission>& emissions) {
    for (const auto& emission : emissions) {
        engine_->schedule(EventKind::Generated, Payload{entity_->name(), emission.detail}, 0.0,
                          [this, emission](Engine& engine, const Event&) {
                              engine.trace(entity_->name(), "Generated", emission.detail);
                              for (auto& hook : emission_hooks_) hook(emission);
                              if (auto it = signals_.find(emission.tag); it != signals_.end()) {
                                  it->second.trigger(engine);
                              }
                          });
    }
}

void EntityPort::finish_activation(EventKind cause) {
    ++activations_;
    for (auto& hook : activation_hooks_) hook(*entity_, cause);
    reschedule_wakeup();
}

void EntityPort::reschedule_wakeup() {
    if (delivery_ != WakeupDelivery::Queue) return;
    const auto next = next_self_activation(*entity_);
    if (next == pending_wakeup_time_ && pending_wakeup_ && engine_->state(*pending_wakeup_) == EventState::Pending) {
        return;
    }
    pending_wakeup_.reset();
    pending_wakeup_time_.reset();
    if (!next) return;
    pending_wakeup_ = engine_->schedule_at(EventKind::Wakeup, Payload{entity_->name(), "wakeup"}, *next,
                                           [this](Engine&, const Event& event) { on_wakeup(event); });
    pending_wakeup_time_ = next;
}

void EntityPort::on_wakeup(const Event& event) {
    if (!pending_wakeup_ || *pending_wakeup_ != event.id) {
        engine_->mark_stale(event.id);
        ++stale_wakeups_;
        return;
    }
    pending_wakeup_.reset();
    pending_wakeup_time_.reset();
    activate(EventKind::Wakeup);
}

Signal& EntityPort::signal(const std::string& tag) {
    auto [it, inserted] = signals_.try_emplace(tag, entity_->name() + ":" + tag);
    return it->second;
}

}  // namespace hybridsim
