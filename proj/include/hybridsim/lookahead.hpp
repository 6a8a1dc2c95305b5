#pragma once

#include "hybridsim/continuous.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace hybridsim {

struct PeekResult {
    std::optional<Prediction> earliest_event;
    SimTime horizon_reached = 0.0;
};

/// Peek-ahead wrapper around a port whose wakeups are driven externally.
///
/// peek() integrates a private copy of the entity along its own wakeup
/// cadence and stops at the first activation that produces outputs. Nothing
/// observable changes until commit(t), which replays the same activations up
/// to t on the real entity through the port. discard() drops the copy.
class PeekableEntity {
public:
    explicit PeekableEntity(EntityPort& port);

    PeekResult peek(SimTime horizon);
    void commit(SimTime t);
    void discard() noexcept { tentative_.reset(); }

    bool has_tentative_state() const noexcept { return tentative_ != nullptr; }
    EntityPort& port() noexcept { return *port_; }

private:
    EntityPort* port_;
    std::unique_ptr<ContinuousEntity> tentative_;
};

struct LookaheadStats {
    std::uint64_t iterations = 0;
    std::uint64_t peeks = 0;
    std::uint64_t rollbacks = 0;
};

/// Event-stepped loop that advances continuous entities by peeking up to the
/// next queued event instead of queueing a wakeup per integration step.
///
/// Each iteration takes the tentative step to the next queued event (or t_end),
/// peeks every entity over it, and moves the clock to the earliest predicted
/// output, or to the queued event if none is predicted. Continuous state is
/// committed before a queued event at the same clock value executes.
class LookaheadScheduler {
public:
    LookaheadScheduler(Engine& engine, std::vector<EntityPort*> ports);

    /// Time to the next queued event, or to t_end when the queue is empty.
    SimTime tentative_step(SimTime t_end) const;

    /// One iteration. Returns the new clock.
    SimTime advance_iteration(SimTime t_end);

    SimTime run_until(SimTime t_end);

    const LookaheadStats& stats() const noexcept { return stats_; }

private:
    bool finished(SimTime t_end) const;

    Engine* engine_;
    std::vector<PeekableEntity> entities_;
    LookaheadStats stats_;
};

}  // namespace hybridsim
