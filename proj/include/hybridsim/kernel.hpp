#pragma once

#include <coroutine>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hybridsim {

// Simulation time in seconds.
using SimTime = double;

enum class EventId : std::uint64_t {};

constexpr std::uint64_t to_index(EventId id) noexcept { return static_cast<std::uint64_t>(id); }

enum class EventKind : std::uint8_t { Perturbation, Probe, Generated, Wakeup, Timeout, ProcessResume };

enum class EventState : std::uint8_t { Pending, Fired, Stale };

std::string_view to_string(EventKind kind) noexcept;
std::string_view to_string(EventState state) noexcept;

struct Payload {
    std::string source;
    std::string detail;
};

struct Event {
    EventId id{};
    SimTime time = 0.0;
    EventKind kind = EventKind::Timeout;
    Payload payload;
};

struct EngineStats {
    std::uint64_t events_executed = 0;
    std::uint64_t queue_insertions = 0;
};

class Engine;
class Process;

namespace detail {

// Shared by every source a suspended process is registered with. The first
// source to fire resumes the coroutine; later ones see `done` and do nothing.
struct Waiter {
    std::coroutine_handle<> handle;
    bool done = false;
    int fired_by = -1;
};

void resume(std::coroutine_handle<> handle);

}  // namespace detail

/// Edge-triggered broadcast condition. A process awaiting a signal resumes on
/// the next trigger after it started waiting; triggers with no waiters are lost.
class Signal {
public:
    explicit Signal(std::string name = {}) : name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }
    std::size_t waiter_count() const noexcept { return waiters_.size(); }

    /// Resumes all current waiters through one ProcessResume event at the
    /// current clock, in the order they started waiting.
    void trigger(Engine& engine);

    void add_waiter(std::shared_ptr<detail::Waiter> waiter, int branch);

    auto operator co_await() noexcept;

private:
    std::string name_;
    std::vector<std::pair<std::shared_ptr<detail::Waiter>, int>> waiters_;
};

/// Which branch ended a `first_of` wait.
enum class WaitOutcome : std::uint8_t { Timeout, Signalled };

class Engine {
public:
    using Callback = std::function<void(Engine&, const Event&)>;
    using TraceSink = std::function<void(SimTime, std::string_view source, std::string_view kind,
                                         std::string_view detail)>;

    explicit Engine(SimTime start = 0.0);
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    SimTime now() const noexcept { return now_; }

    EventId schedule(EventKind kind, Payload payload, SimTime delay, Callback callback = {});
    EventId schedule_at(EventKind kind, Payload payload, SimTime time, Callback callback = {});

    /// Attaches a callback to a pending event. Fails for events that already fired.
    void on_fire(EventId id, Callback callback);

    EventState state(EventId id) const;
    void mark_stale(EventId id);

    /// Executes every event with time <= t_end (inclusive), returns the clock.
    SimTime run_until(SimTime t_end);

    /// Pops and executes the earliest event. Returns false on an empty queue.
    bool step();

    std::optional<SimTime> next_event_time() const;
    bool queue_empty() const noexcept { return queue_.empty(); }
    std::size_t pending_count() const noexcept { return queue_.size(); }

    /// Moves the clock forward without executing events. Used by schedulers
    /// that integrate continuous state between queued events.
    void advance_clock(SimTime t);

    void spawn(Process process, std::string name = "process");

    const EngineStats& stats() const noexcept { return stats_; }

    void set_trace(TraceSink sink) { trace_ = std::move(sink); }
    void trace(std::string_view source, std::string_view kind, std::string_view detail);

    // Awaitables for use inside processes.
    auto timeout(SimTime delay);
    auto wait(EventId id);
    auto first_of(SimTime timeout, Signal& signal);

private:
    struct Key {
        SimTime time;
        std::uint64_t id;
        auto operator<=>(const Key&) const = default;
    };
    struct Entry {
        EventKind kind;
        Payload payload;
        std::vector<Callback> callbacks;
    };

    void execute(Key key, Entry entry);

    SimTime now_;
    std::uint64_t next_id_ = 0;
    std::map<Key, Entry> queue_;
    std::vector<SimTime> times_;          // scheduled time per id
    std::vector<EventState> states_;      // state per id
    std::vector<Process> processes_;
    EngineStats stats_;
    TraceSink trace_;
};

/// Coroutine type for sequential kernel processes. Suspends only at
/// `co_await` on engine awaitables or signals.
class Process {
public:
    enum class Status : std::uint8_t { Runnable, Waiting, Finished };

    struct promise_type {
        Status status = Status::Runnable;
        std::exception_ptr failure;

        Process get_return_object() { return Process{handle_type::from_promise(*this)}; }
        std::suspend_always initial_suspend() noexcept { return {}; }
        std::suspend_always final_suspend() noexcept {
            status = Status::Finished;
            return {};
        }
        void return_void() noexcept {}
        void unhandled_exception() noexcept { failure = std::current_exception(); }
    };
    using handle_type = std::coroutine_handle<promise_type>;

    Process() = default;
    explicit Process(handle_type handle) : handle_(handle) {}
    Process(Process&& other) noexcept : handle_(std::exchange(other.handle_, {})) {}
    Process& operator=(Process&& other) noexcept {
        if (this != &other) {
            reset();
            handle_ = std::exchange(other.handle_, {});
        }
        return *this;
    }
    Process(const Process&) = delete;
    Process& operator=(const Process&) = delete;
    ~Process() { reset(); }

    Status status() const noexcept { return handle_ ? handle_.promise().status : Status::Finished; }
    handle_type handle() const noexcept { return handle_; }

private:
    void reset() noexcept {
        if (handle_) handle_.destroy();
        handle_ = {};
    }
    handle_type handle_{};
};

namespace detail {

inline void mark_waiting(std::coroutine_handle<> h) {
    Process::handle_type::from_address(h.address()).promise().status = Process::Status::Waiting;
}

struct TimeoutAwaiter {
    Engine* engine;
    SimTime delay;

    bool await_ready() const noexcept { return false; }
    void await_suspend(std::coroutine_handle<> h) {
        mark_waiting(h);
        engine->schedule(EventKind::Timeout, Payload{"process", "timeout"}, delay,
                         [h](Engine&, const Event&) { resume(h); });
    }
    void await_resume() const noexcept {}
};

struct EventAwaiter {
    Engine* engine;
    EventId id;

    // An event that already fired resumes the awaiting process immediately.
    bool await_ready() const { return engine->state(id) != EventState::Pending; }
    void await_suspend(std::coroutine_handle<> h) {
        mark_waiting(h);
        engine->on_fire(id, [h](Engine&, const Event&) { resume(h); });
    }
    void await_resume() const noexcept {}
};

struct SignalAwaiter {
    Signal* signal;

    bool await_ready() const noexcept { return false; }
    void await_suspend(std::coroutine_handle<> h) {
        mark_waiting(h);
        auto waiter = std::make_shared<Waiter>();
        waiter->handle = h;
        signal->add_waiter(std::move(waiter), 0);
    }
    void await_resume() const noexcept {}
};

struct FirstOfAwaiter {
    Engine* engine;
    SimTime delay;
    Signal* signal;
    std::shared_ptr<Waiter> waiter = std::make_shared<Waiter>();

    bool await_ready() const noexcept { return false; }
    void await_suspend(std::coroutine_handle<> h) {
        mark_waiting(h);
        waiter->handle = h;
        signal->add_waiter(waiter, 1);
        engine->schedule(EventKind::Timeout, Payload{"process", "timeout"}, delay,
                         [w = waiter](Engine&, const Event&) {
                             if (w->done) return;
                             w->done = true;
                             w->fired_by = 0;
                             resume(w->handle);
                         });
    }
    WaitOutcome await_resume() const noexcept {
        return waiter->fired_by == 1 ? WaitOutcome::Signalled : WaitOutcome::Timeout;
    }
};

}  // namespace detail

inline auto Signal::operator co_await() noexcept { return detail::SignalAwaiter{this}; }

inline auto Engine::timeout(SimTime delay) { return detail::TimeoutAwaiter{this, delay}; }
inline auto Engine::wait(EventId id) { return detail::EventAwaiter{this, id}; }
inline auto Engine::first_of(SimTime timeout, Signal& signal) {
    return detail::FirstOfAwaiter{this, timeout, &signal};
}

}  // namespace hybridsim
