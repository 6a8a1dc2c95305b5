#include "hybridsim/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace hybridsim {

std::string_view to_string(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::Perturbation: return "Perturbation";
        case EventKind::Probe: return "Probe";
        case EventKind::Generated: return "Generated";
        case EventKind::Wakeup: return "Wakeup";
        case EventKind::Timeout: return "Timeout";
        case EventKind::ProcessResume: return "ProcessResume";
    }
    return "Unknown";
}

std::string_view to_string(EventState state) noexcept {
    switch (state) {
        case EventState::Pending: return "Pending";
        case EventState::Fired: return "Fired";
        case EventState::Stale: return "Stale";
    }
    return "Unknown";
}

namespace detail {

void resume(std::coroutine_handle<> handle) {
    auto typed = Process::handle_type::from_address(handle.address());
    typed.promise().status = Process::Status::Runnable;
    typed.resume();
    if (auto failure = typed.promise().failure) {
        typed.promise().failure = nullptr;
        std::rethrow_exception(failure);
    }
}

}  // namespace detail

void Signal::add_waiter(std::shared_ptr<detail::Waiter> waiter, int branch) {
    waiters_.emplace_back(std::move(waiter), branch);
}

void Signal::trigger(Engine& engine) {
    if (waiters_.empty()) return;
    auto batch = std::exchange(waiters_, {});
    engine.schedule(EventKind::ProcessResume, Payload{name_, "signal"}, 0.0,
                    [batch = std::move(batch)](Engine&, const Event&) {
                        for (const auto& [waiter, branch] : batch) {
                            if (waiter->done) continue;
                            waiter->done = true;
                            waiter->fired_by = branch;
                            detail::resume(waiter->handle);
                        }
                    });
}

Engine::Engine(SimTime start) : now_(start) {
    if (!std::isfinite(start) || start < 0.0) {
        throw std::invalid_argument("engine start time must be finite and non-negative");
    }
}

// Pending callbacks may refer to processes; drop them before the coroutine frames.
Engine::~Engine() {
    queue_.clear();
    processes_.clear();
}

EventId Engine::schedule(EventKind kind, Payload payload, SimTime delay, Callback callback) {
    if (!std::isfinite(delay) || delay < 0.0) {
        throw std::invalid_argument("cannot schedule '" + payload.source + "' event with negative or non-finite delay " +
                                    std::to_string(delay));
    }
    return schedule_at(kind, std::move(payload), now_ + delay, std::move(callback));
}

EventId Engine::schedule_at(EventKind kind, Payload payload, SimTime time, Callback callback) {
    if (!std::isfinite(time) || time < now_) {
        throw std::invalid_argument("cannot schedule '" + payload.source + "' event in the past (t=" +
                                    std::to_string(time) + ", now=" + std::to_string(now_) + ")");
    }
    const std::uint64_t id = next_id_++;
    Entry entry{kind, std::move(payload), {}};
    if (callback) entry.callbacks.push_back(std::move(callback));
    queue_.emplace(Key{time, id}, std::move(entry));
    times_.push_back(time);
    states_.push_back(EventState::Pending);
    ++stats_.queue_insertions;
    return EventId{id};
}

void Engine::on_fire(EventId id, Callback callback) {
    const auto index = to_index(id);
    if (index >= next_id_) throw std::out_of_range("unknown event id");
    auto it = queue_.find(Key{times_[index], index});
    if (it == queue_.end()) throw std::logic_error("event already fired");
    it->second.callbacks.push_back(std::move(callback));
}

EventState Engine::state(EventId id) const {
    const auto index = to_index(id);
    if (index >= next_id_) throw std::out_of_range("unknown event id");
    return states_[index];
}

void Engine::mark_stale(EventId id) {
    const auto index = to_index(id);
    if (index >= next_id_) throw std::out_of_range("unknown event id");
    states_[index] = EventState::Stale;
}

bool Engine::step() {
    if (queue_.empty()) return false;
    auto node = queue_.extract(queue_.begin());
    execute(node.key(), std::move(node.mapped()));
    return true;
}

void Engine::execute(Key key, Entry entry) {
    now_ = key.time;
    states_[key.id] = EventState::Fired;
    ++stats_.events_executed;
    const Event event{EventId{key.id}, key.time, entry.kind, std::move(entry.payload)};
    for (auto& callback : entry.callbacks) callback(*this, event);
}

SimTime Engine::run_until(SimTime t_end) {
    if (!(t_end >= now_)) throw std::invalid_argument("run_until target lies before the current clock");
    while (!queue_.empty() && queue_.begin()->first.time <= t_end) step();
    if (!queue_.empty()) now_ = t_end;
    return now_;
}

std::optional<SimTime> Engine::next_event_time() const {
    if (queue_.empty()) return std::nullopt;
    return queue_.begin()->first.time;
}

void Engine::advance_clock(SimTime t) {
    if (!(t >= now_)) throw std::invalid_argument("clock cannot move backwards");
    if (!queue_.empty() && queue_.begin()->first.time < t) {
        throw std::logic_error("clock cannot pass a pending event");
    }
    now_ = t;
}

void Engine::spawn(Process process, std::string name) {
    auto handle = process.handle();
    if (!handle) throw std::invalid_argument("cannot spawn an empty process");
    processes_.push_back(std::move(process));
    schedule(EventKind::ProcessResume, Payload{std::move(name), "start"}, 0.0,
             [handle](Engine&, const Event&) { detail::resume(handle); });
}

void Engine::trace(std::string_view source, std::string_view kind, std::string_view detail) {
    if (trace_) trace_(now_, source, kind, detail);
}

}  // namespace hybridsim
