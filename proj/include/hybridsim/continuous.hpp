#pragma once

#include "hybridsim/kernel.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hybridsim {

/// Next wakeup at the entity's own prediction of its next generated event.
struct Predictive {
    bool operator==(const Predictive&) const = default;
};

/// Periodic wakeups every `dt` seconds after the last update.
struct FixedStep {
    SimTime dt;
    bool operator==(const FixedStep&) const = default;
};

using WakeupPolicy = std::variant<Predictive, FixedStep>;

WakeupPolicy make_fixed_step(SimTime dt);

/// An output produced by a state update: a threshold crossing, a boundary
/// arrival. `tag` is what processes subscribe to.
struct Emission {
    std::string tag;
    std::string detail;
    SimTime time = 0.0;

    bool operator==(const Emission&) const = default;
};

struct Prediction {
    SimTime time;
    std::string descriptor;
};

/// State and update rule of a continuous entity. Implementations touch only
/// their own state; all interaction with the kernel goes through EntityPort.
class ContinuousEntity {
public:
    explicit ContinuousEntity(std::string name) : name_(std::move(name)) {}
    virtual ~ContinuousEntity() = default;

    const std::string& name() const noexcept { return name_; }

    virtual SimTime last_update_time() const = 0;
    virtual WakeupPolicy wakeup_policy() const = 0;

    /// Advances the state to `t` (t >= last_update_time) and returns the
    /// generated outputs whose conditions were met at `t`.
    virtual std::vector<Emission> update_to(SimTime t) = 0;

    virtual std::optional<Prediction> predict_next_event() const = 0;

    /// The monitored quantity at last_update_time.
    virtual double probe_value() const = 0;

    virtual std::uint64_t state_hash() const = 0;

    virtual std::unique_ptr<ContinuousEntity> clone() const = 0;

protected:
    ContinuousEntity(const ContinuousEntity&) = default;
    ContinuousEntity& operator=(const ContinuousEntity&) = default;

private:
    std::string name_;
};

/// Time of the next self-scheduled update under the entity's policy.
std::optional<SimTime> next_self_activation(const ContinuousEntity& entity);

/// FNV-1a accumulation used by entity state hashes.
class StateHasher {
public:
    StateHasher& add_bytes(const void* data, std::size_t size) noexcept;
    StateHasher& add(double value) noexcept { return add_bytes(&value, sizeof value); }
    StateHasher& add(bool value) noexcept { return add_bytes(&value, sizeof value); }
    std::uint64_t value() const noexcept { return hash_; }

private:
    std::uint64_t hash_ = 14695981039346656037ull;
};

enum class WakeupDelivery : std::uint8_t {
    Queue,     // wakeups are Wakeup events in the global queue
    External,  // a scheduler drives self-activations (see LookaheadScheduler)
};

/// Binds a continuous entity into the kernel through perturbation, probe,
/// generated and wakeup events.
///
/// Every activation runs the same protocol: update the state to the current
/// clock, schedule a Generated event for each output, then (re)schedule the
/// wakeup. Wakeups superseded by a later reschedule stay in the queue and are
/// recognised as stale when they fire: they leave the state untouched.
class EntityPort {
public:
    using ActivationHook = std::function<void(const ContinuousEntity&, EventKind cause)>;
    using EmissionHook = std::function<void(const Emission&)>;

    EntityPort(Engine& engine, ContinuousEntity& entity, WakeupDelivery delivery = WakeupDelivery::Queue);

    EntityPort(const EntityPort&) = delete;
    EntityPort& operator=(const EntityPort&) = delete;

    ContinuousEntity& entity() noexcept { return *entity_; }
    const ContinuousEntity& entity() const noexcept { return *entity_; }
    WakeupDelivery delivery() const noexcept { return delivery_; }

    /// Arms the first wakeup. Call once, at the entity's initial time.
    void start();

    /// Probe event: brings the entity up to the clock and returns its value.
    double probe();

    /// Perturbation event: update to the clock, then apply `change`.
    template <typename Change>
    void perturb(std::string_view detail, Change&& change) {
        auto emissions = entity_->update_to(engine_->now());
        publish(emissions);
        std::forward<Change>(change)();
        engine_->trace(entity_->name(), "Perturbation", detail);
        finish_activation(EventKind::Perturbation);
    }

    /// Runs the activation protocol for `cause` at the current clock.
    void activate(EventKind cause);

    /// Self-activation driven by an external scheduler (External delivery).
    /// `t` must equal next_wakeup(); outputs are only allowed when t == now.
    void self_activate(SimTime t);

    /// Next self-activation of the entity; with Queue delivery this is the
    /// time of the live wakeup event.
    std::optional<SimTime> next_wakeup() const { return next_self_activation(*entity_); }

    /// Raised (through a ProcessResume event) each time an emission with this
    /// tag fires as a Generated event.
    Signal& signal(const std::string& tag);

    void on_activation(ActivationHook hook) { activation_hooks_.push_back(std::move(hook)); }
    void on_emission(EmissionHook hook) { emission_hooks_.push_back(std::move(hook)); }

    std::uint64_t activations() const noexcept { return activations_; }
    std::uint64_t stale_wakeups() const noexcept { return stale_wakeups_; }
    std::optional<EventId> pending_wakeup() const noexcept { return pending_wakeup_; }

private:
    void publish(const std::vector<Emission>& emissions);
    void finish_activation(EventKind cause);
    void reschedule_wakeup();
    void on_wakeup(const Event& event);

    Engine* engine_;
    ContinuousEntity* entity_;
    WakeupDelivery delivery_;
    std::optional<EventId> pending_wakeup_;
    std::optional<SimTime> pending_wakeup_time_;
    std::map<std::string, Signal> signals_;
    std::vector<ActivationHook> activation_hooks_;
    std::vector<EmissionHook> emission_hooks_;
    std::uint64_t activations_ = 0;
    std::uint64_t stale_wakeups_ = 0;
};

}  // namespace hybridsim
