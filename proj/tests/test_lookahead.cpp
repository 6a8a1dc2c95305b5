#include "doctest.h"

#include "hybridsim/heater.hpp"
#include "hybridsim/lookahead.hpp"
#include "hybridsim/recorder.hpp"
#include "hybridsim/tank.hpp"
#include "ramp.hpp"

using namespace hybridsim;
using testing_support::Ramp;

namespace {

void trace_into(Engine& engine, std::vector<std::string>& lines) {
    engine.set_trace([&lines](SimTime t, std::string_view source, std::string_view kind, std::string_view detail) {
        lines.push_back(format_real(t) + " " + std::string(source) + " " + std::string(kind) + " " + std::string(detail));
    });
}

}  // namespace

TEST_CASE("tentative step reaches the next queued event or the end time") {
    Engine engine;
    Ramp ramp("ramp", 1.0, 100.0, 1.0);
    EntityPort port(engine, ramp, WakeupDelivery::External);
    LookaheadScheduler scheduler(engine, {&port});
    CHECK(scheduler.tentative_step(100.0) == 100.0);
    engine.schedule(EventKind::Perturbation, Payload{"test", "x"}, 5.0);
    CHECK(scheduler.tentative_step(100.0) == 5.0);
    CHECK(scheduler.tentative_step(3.0) == 3.0);
    engine.schedule(EventKind::Perturbation, Payload{"test", "now"}, 0.0);
    CHECK(scheduler.tentative_step(100.0) == 0.0);
}

TEST_CASE("a predicted output moves the clock before the next queued event") {
    Engine engine;
    Ramp ramp("ramp", 1.0, 2.5, 1.0);  // crosses on the sample at t=3
    Tank tank("tank", TankParams{1.0, 0.1, 0.1}, 0.5);
    EntityPort ramp_port(engine, ramp, WakeupDelivery::External);
    EntityPort tank_port(engine, tank, WakeupDelivery::External);
    LookaheadScheduler scheduler(engine, {&ramp_port, &tank_port});
    engine.schedule(EventKind::Perturbation, Payload{"test", "queued"}, 5.0);

    CHECK(scheduler.advance_iteration(100.0) == 3.0);
    CHECK(ramp.last_update_time() == 3.0);
    CHECK(engine.next_event_time().value() == 3.0);  // the Generated event
    CHECK(engine.pending_count() == 2);
    CHECK(scheduler.stats().peeks == 2);
}

TEST_CASE("simultaneous predictions enqueue in registration order") {
    Engine engine;
    std::vector<std::string> lines;
    trace_into(engine, lines);
    Ramp a("a", 1.0, 2.5, 1.0);
    Ramp b("b", 2.0, 5.5, 1.0);
    EntityPort pa(engine, a, WakeupDelivery::External);
    EntityPort pb(engine, b, WakeupDelivery::External);
    LookaheadScheduler scheduler(engine, {&pa, &pb});
    scheduler.run_until(10.0);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "3 a Generated ramp crossed");
    CHECK(lines[1] == "3 b Generated ramp crossed");
}

TEST_CASE("peek leaves the entity untouched and commit matches a direct update") {
    Engine engine;
    Heater heater("heater", HeaterParams{});
    heater.set_power(true);
    EntityPort port(engine, heater, WakeupDelivery::External);
    PeekableEntity peekable(port);
    const auto before = heater.state_hash();
    const auto result = peekable.peek(200.0);
    CHECK(heater.state_hash() == before);
    REQUIRE(result.earliest_event);
    CHECK(result.earliest_event->descriptor == "probe crossed 35 rising");
    peekable.discard();
    CHECK_FALSE(peekable.has_tentative_state());

    Heater direct("heater", HeaterParams{});
    direct.set_power(true);
    for (int k = 1; k <= 40; ++k) direct.update_to(k * direct.step_size());
    peekable.commit(40 * heater.step_size());
    CHECK(heater.grid() == direct.grid());
}

TEST_CASE("a failing peek leaves state and clock at the last commit") {
    Engine engine;
    Ramp ramp("ramp", 1.0, 100.0, 1.0, 2.5);
    EntityPort port(engine, ramp, WakeupDelivery::External);
    LookaheadScheduler scheduler(engine, {&port});
    engine.schedule(EventKind::Perturbation, Payload{"test", "queued"}, 2.0);
    CHECK(scheduler.advance_iteration(10.0) == 2.0);
    CHECK(scheduler.advance_iteration(10.0) == 2.0);  // executes the queued event
    const auto hash = ramp.state_hash();
    CHECK_THROWS_AS(scheduler.advance_iteration(10.0), std::runtime_error);
    CHECK(ramp.state_hash() == hash);
    CHECK(engine.now() == 2.0);
}

TEST_CASE("queue-delivered ports are refused") {
    Engine engine;
    Ramp ramp("ramp", 1.0, 100.0, 1.0);
    EntityPort port(engine, ramp);
    CHECK_THROWS_AS(PeekableEntity{port}, std::invalid_argument);
}

TEST_CASE("lookahead and event-stepped runs produce the same trace") {
    auto run = [](bool lookahead) {
        Engine engine;
        std::vector<std::string> lines;
        trace_into(engine, lines);
        Heater heater("heater", HeaterParams{});
        Tank tank("tank", TankParams{1.0, 0.01, 0.005}, 0.2);
        const auto delivery = lookahead ? WakeupDelivery::External : WakeupDelivery::Queue;
        EntityPort hp(engine, heater, delivery);
        EntityPort tp(engine, tank, delivery);
        hp.start();
        tp.start();
        for (double t : {0.0, 400.0, 900.0, 1500.0}) {
            engine.schedule_at(EventKind::Perturbation, Payload{"test", "power"}, t, [&](Engine&, const Event&) {
                hp.perturb("toggle", [&] { heater.set_power(!heater.heater_on()); });
            });
        }
        for (double t : {10.0, 130.0, 600.0}) {
            engine.schedule_at(EventKind::Perturbation, Payload{"test", "valve"}, t, [&](Engine&, const Event&) {
                tp.perturb("inlet", [&] { tank.set_valve(Valve::Inlet, !tank.inlet_open()); });
            });
        }
        engine.schedule_at(EventKind::Probe, Payload{"test", "probe"}, 777.7, [&](Engine&, const Event&) { hp.probe(); });
        if (lookahead) {
            LookaheadScheduler scheduler(engine, {&hp, &tp});
            scheduler.run_until(2000.0);
        } else {
            engine.run_until(2000.0);
        }
        return std::pair{lines, engine.stats().queue_insertions};
    };
    const auto [stepped, stepped_insertions] = run(false);
    const auto [peeked, peeked_insertions] = run(true);
    CHECK(stepped == peeked);
    CHECK(stepped.size() > 10);
    CHECK(peeked_insertions < stepped_insertions);
}
