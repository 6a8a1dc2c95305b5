// Acceptance checks. One PASS/FAIL line per criterion; nonzero exit if any fail.

#include "hybridsim/artifacts.hpp"
#include "hybridsim/heater.hpp"
#include "hybridsim/scenario.hpp"
#include "hybridsim/tank.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <regex>
#include <string>

using namespace hybridsim;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& check) {
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("%s %d %s%s%s\n", v.pass ? "PASS" : "FAIL", id, title.c_str(), v.detail.empty() ? "" : " -- ",
                v.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

// Last probe sample at or before t.
double probe_at(const RunResult& result, SimTime t) {
    const auto& s = result.probe_series;
    double value = NAN;
    for (std::size_t k = 0; k < s.size() && s.time(k) <= t; ++k) value = s.value(k, 0);
    return value;
}

std::vector<EventLogRecord> heater_crossings(const RunResult& result, SimTime from, SimTime to) {
    std::vector<EventLogRecord> out;
    for (const auto& r : generated_events(result.log)) {
        if (r.source == "heater" && r.time >= from && r.time < to) out.push_back(r);
    }
    return out;
}

Verdict steady_state() {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    const auto result = run_scenario(demo_config(ScenarioKind::Heater));
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double probe = probe_at(result, 12.0 * kSecondsPerMinute);
    v.require(probe >= 62.0 && probe <= 63.0, "probe at 12 min = " + fmt(probe) + " C outside [62, 63]");
    v.require(elapsed < 5.0, "runtime " + fmt(elapsed, 2) + " s");
    if (v.pass) v.detail = "probe at 12 min = " + fmt(probe) + " C, runtime " + fmt(elapsed, 3) + " s";
    return v;
}

Verdict event_sequence() {
    Verdict v;
    const auto result = run_scenario(demo_config(ScenarioKind::Heater));
    const SimTime off = 12.5 * kSecondsPerMinute;
    const SimTime period = 25.0 * kSecondsPerMinute;

    const auto c1 = heater_crossings(result, 0.0, period);
    std::vector<std::string> details;
    for (const auto& r : c1) details.push_back(r.detail);
    const std::vector<std::string> expected{"probe crossed 35 rising", "probe crossed 50 rising",
                                            "probe crossed 50 falling", "probe crossed 35 falling"};
    v.require(details == expected, "cycle 1 crossing sequence differs");
    if (details == expected) {
        v.require(c1[0].time < off && c1[1].time < off, "rising crossings not before OFF");
        v.require(c1[2].time > off && c1[3].time > off, "falling crossings not after OFF");
    }

    const auto c2 = heater_crossings(result, period, 2 * period);
    double worst = 0.0;
    v.require(c2.size() == c1.size(), "cycle 2 has " + std::to_string(c2.size()) + " crossings");
    for (std::size_t k = 0; k < std::min(c1.size(), c2.size()); ++k) {
        v.require(c2[k].detail == c1[k].detail, "cycle 2 order differs");
        worst = std::max(worst, std::abs((c2[k].time - period) - c1[k].time));
    }
    v.require(worst <= 1.25, "cycle 2 timing off by " + fmt(worst) + " s");

    const double at20 = probe_at(result, 20.0 * kSecondsPerMinute);
    double first_below = NAN;
    for (std::size_t k = 0; k < result.probe_series.size(); ++k) {
        if (result.probe_series.time(k) > off && result.probe_series.value(k, 0) <= 25.5) {
            first_below = result.probe_series.time(k);
            break;
        }
    }
    v.require(at20 <= 25.5, "probe at 20 min = " + fmt(at20) + " C > 25.5 (first <= 25.5 at " +
                                fmt(first_below / kSecondsPerMinute, 2) + " min)");
    if (v.pass) v.detail = "crossings in order, cycle 2 deviation " + fmt(worst) + " s, probe at 20 min " + fmt(at20);
    return v;
}

Verdict stability() {
    Verdict v;
    const double low = 25.0;
    const double high = 100.0;
    double lo_seen = high;
    double hi_seen = low;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto config = demo_config(ScenarioKind::Heater);
        config.seed = seed;
        config.heater_schedule.cycles = 0;  // random ON/OFF toggles from the start
        config.heater_schedule.random_interval = {0.5, 15.0};
        config.snapshot_times.clear();
        RunHooks hooks;
        hooks.after_heater_update = [&](const Heater& h) {
            for (double x : h.grid().values()) {
                lo_seen = std::min(lo_seen, x);
                hi_seen = std::max(hi_seen, x);
            }
        };
        run_scenario(config, hooks);
    }
    v.require(lo_seen >= low && hi_seen <= high, "grid range [" + fmt(lo_seen, 6) + ", " + fmt(hi_seen, 6) + "]");

    Heater heater("heater", HeaterParams{});
    v.require(std::abs(heater.step_size() * HeaterParams{}.alpha / (HeaterParams{}.spacing() * HeaterParams{}.spacing()) -
                       0.25) < 1e-12,
              "gamma at the stable step is not 1/4");
    bool rejected = false;
    try {
        heater.fe_step(heater.step_size() * 1.001);
    } catch (const std::invalid_argument&) {
        rejected = true;
    }
    v.require(rejected, "oversized step accepted");
    if (v.pass) v.detail = "20 seeds, grid range [" + fmt(lo_seen, 6) + ", " + fmt(hi_seen, 6) + "]";
    return v;
}

struct Toggle {
    SimTime t;
    Valve valve;
    bool open;
};

Verdict tank_exactness() {
    Verdict v;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> gap(6.0, 600.0);
    std::uniform_real_distribution<double> rate(0.05 / 60.0, 0.5 / 60.0);
    std::uniform_real_distribution<double> initial(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    double worst_time = 0.0;
    double worst_level = 0.0;
    std::size_t arrivals_checked = 0;
    std::uint64_t stale_total = 0;
    bool stale_neutral = true;

    for (int trial = 0; trial < 100; ++trial) {
        const TankParams p{1.0, rate(rng), rate(rng)};
        const double level0 = initial(rng);
        const SimTime t_end = 7200.0;
        std::vector<Toggle> toggles;
        bool open[2] = {false, false};
        for (SimTime t = gap(rng); t < t_end; t += gap(rng)) {
            const int which = coin(rng) ? 0 : 1;
            open[which] = !open[which];
            toggles.push_back({t, which == 0 ? Valve::Inlet : Valve::Outlet, open[which]});
        }

        // Oracle: 0.6 s steps with clamping, partial steps to toggles, and the
        // closed-form arrival time inside the clamping step.
        std::vector<double> oracle_levels;
        std::vector<std::pair<SimTime, std::string>> oracle_arrivals;
        {
            double level = level0;
            bool in = false;
            bool out = false;
            SimTime t = 0.0;
            auto advance = [&](SimTime target) {
                while (t < target) {
                    const double dt = std::min(0.6, target - t);
                    const double r = net_rate(p, in, out);
                    const double next = std::clamp(level + r * dt, 0.0, p.max_level);
                    if (level > 0.0 && next == 0.0) oracle_arrivals.emplace_back(t + level / -r, "tank_empty");
                    if (level < p.max_level && next == p.max_level) {
                        oracle_arrivals.emplace_back(t + (p.max_level - level) / r, "tank_full");
                    }
                    level = next;
                    t += dt;
                }
            };
            for (const auto& tog : toggles) {
                advance(tog.t);
                oracle_levels.push_back(level);
                (tog.valve == Valve::Inlet ? in : out) = tog.open;
            }
            advance(t_end);
        }

        Engine engine;
        Tank tank("tank", p, level0);
        EntityPort port(engine, tank);
        std::vector<double> levels;
        std::vector<std::pair<SimTime, std::string>> arrivals;
        port.on_emission([&](const Emission& e) { arrivals.emplace_back(e.time, e.tag); });
        port.start();
        for (const auto& tog : toggles) {
            engine.schedule_at(EventKind::Perturbation, Payload{"valve", ""}, tog.t, [&, tog](Engine&, const Event&) {
                port.perturb("valve", [&] {
                    levels.push_back(tank.level());
                    tank.set_valve(tog.valve, tog.open);
                });
            });
        }
        // A probe every 7 minutes moves predictive wakeups and leaves stale ones.
        for (SimTime t = 420.0; t < t_end; t += 420.0) {
            engine.schedule_at(EventKind::Probe, Payload{"probe", ""}, t, [&](Engine&, const Event&) { port.probe(); });
        }
        while (engine.next_event_time() && *engine.next_event_time() <= t_end) {
            const auto hash = tank.state_hash();
            const auto stale = port.stale_wakeups();
            engine.step();
            if (port.stale_wakeups() != stale) stale_neutral = stale_neutral && tank.state_hash() == hash;
        }
        stale_total += port.stale_wakeups();

        if (levels.size() != oracle_levels.size() || arrivals.size() != oracle_arrivals.size()) {
            v.require(false, "trial " + std::to_string(trial) + ": record count mismatch");
            continue;
        }
        for (std::size_t k = 0; k < levels.size(); ++k) {
            worst_level = std::max(worst_level, std::abs(levels[k] - oracle_levels[k]));
        }
        for (std::size_t k = 0; k < arrivals.size(); ++k) {
            v.require(arrivals[k].second == oracle_arrivals[k].second, "arrival kind mismatch");
            worst_time = std::max(worst_time, std::abs(arrivals[k].first - oracle_arrivals[k].first));
        }
        arrivals_checked += arrivals.size();
    }
    v.require(worst_time <= 1e-9, "arrival time error " + std::to_string(worst_time) + " s");
    v.require(worst_level <= 1e-9, "level error " + std::to_string(worst_level) + " m");
    v.require(stale_total > 0, "no stale wakeups exercised");
    v.require(stale_neutral, "a stale wakeup changed the tank state");
    if (v.pass) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%zu arrivals, max time err %.2e s, max level err %.2e m, %llu stale wakeups",
                      arrivals_checked, worst_time, worst_level, static_cast<unsigned long long>(stale_total));
        v.detail = buf;
    }
    return v;
}

Verdict causality() {
    Verdict v;
    const auto result = run_scenario(demo_config(ScenarioKind::System));
    const auto& records = result.log.records();
    static const std::regex start_re(R"(job_start id=(\d+) interarrival_s=(\S+) duration_s=(\S+))");
    int offs = 0;
    int starts = 0;
    bool busy = false;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& r = records[k];
        if (r.source == "heater" && r.detail == "power off") {
            ++offs;
            bool shared = false;
            for (const auto& other : records) {
                shared = shared || (other.time == r.time && other.kind == "Generated" && other.detail == "tank_empty");
            }
            v.require(shared, "heater OFF at " + fmt(r.time) + " s without tank_empty");
        }
        std::smatch m;
        if (r.source == "jobs" && std::regex_match(r.detail, m, start_re)) {
            ++starts;
            const double probe = probe_at(result, r.time);
            v.require(probe >= 50.0, "job start at " + fmt(r.time) + " s with probe " + fmt(probe));
            v.require(!busy, "job " + std::string(m[1]) + " overlaps the previous job");
            busy = true;
            const double inter = std::stod(m[2]);
            const double dur = std::stod(m[3]);
            v.require(inter >= 30.0 && inter <= 60.0, "interarrival " + fmt(inter) + " s");
            v.require(dur >= 30.0 && dur <= 60.0, "duration " + fmt(dur) + " s");
        }
        if (r.source == "jobs" && (r.detail.starts_with("job_end") || r.detail.starts_with("job_aborted"))) {
            v.require(busy, "job end without a start");
            busy = false;
        }
    }
    v.require(offs > 0, "no heater OFF records to check");
    v.require(starts > 0, "no jobs ran");
    if (v.pass) v.detail = std::to_string(offs) + " heater OFF records, " + std::to_string(starts) + " jobs";
    return v;
}

Verdict determinism() {
    Verdict v;
    for (auto kind : {ScenarioKind::Heater, ScenarioKind::Tank, ScenarioKind::System}) {
        const auto a = run_scenario(demo_config(kind)).log.to_jsonl();
        const auto b = run_scenario(demo_config(kind)).log.to_jsonl();
        v.require(a == b, std::string(to_string(kind)) + " logs differ");
    }
    return v;
}

double grid_diff(const Grid& a, const Grid& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
    return d;
}

Verdict lookahead_equivalence() {
    Verdict v;
    std::string summary;
    for (auto kind : {ScenarioKind::System, ScenarioKind::Heater}) {
        const std::string name(to_string(kind));
        auto config = demo_config(kind);
        config.scheduler = SchedulerMode::EventStepped;
        const auto base = run_scenario(config);
        config.scheduler = SchedulerMode::Lookahead;
        const auto peek = run_scenario(config);

        const auto g1 = generated_events(base.log);
        const auto g2 = generated_events(peek.log);
        bool same = g1.size() == g2.size();
        for (std::size_t k = 0; same && k < g1.size(); ++k) {
            same = g1[k].source == g2[k].source && g1[k].detail == g2[k].detail &&
                   std::abs(g1[k].time - g2[k].time) <= 1e-9;
        }
        v.require(same, name + ": generated events differ");
        if (base.final_heater && peek.final_heater) {
            const double d = grid_diff(base.final_heater->grid(), peek.final_heater->grid());
            v.require(d <= 1e-9, name + ": final heater grids differ by " + std::to_string(d));
        }
        if (base.final_tank && peek.final_tank) {
            v.require(std::abs(base.final_tank->level() - peek.final_tank->level()) <= 1e-9,
                      name + ": final tank levels differ");
        }
        if (kind == ScenarioKind::Heater) {
            v.require(peek.stats.queue_insertions < base.stats.queue_insertions, "heater: insertions not reduced");
        }
        summary += (summary.empty() ? "" : ", ") + name + " insertions " + std::to_string(base.stats.queue_insertions) +
                   " -> " + std::to_string(peek.stats.queue_insertions);
    }
    if (v.pass) v.detail = summary;
    return v;
}

std::vector<std::string> read_lines(const fs::path& file) {
    std::ifstream in(file);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

Verdict artifacts() {
    Verdict v;
    const fs::path root = fs::temp_directory_path() / "hybridsim_acceptance";
    fs::remove_all(root);
    for (auto kind : {ScenarioKind::Heater, ScenarioKind::Tank, ScenarioKind::System}) {
        const std::string name(to_string(kind));
        const auto config = demo_config(kind);
        const auto result = run_scenario(config);
        const fs::path dir = root / name;
        write_run_artifacts(result, config.scheduler, dir);

        const auto events = read_lines(dir / "events.jsonl");
        v.require(events.size() == result.log.records().size(), name + ": events.jsonl line count");
        for (const auto& line : events) {
            const auto j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("t") || !j.contains("source") || !j.contains("kind") ||
                !j.contains("detail")) {
                v.require(false, name + ": bad events.jsonl line");
                break;
            }
        }
        const auto tank = read_lines(dir / "tank.csv");
        v.require(!tank.empty() && tank[0] == "time_s,level_m,inlet_open,outlet_open", name + ": tank.csv header");
        const auto probe = read_lines(dir / "heater_probe.csv");
        v.require(!probe.empty() && probe[0] == "time_s,probe_temp_C,heater_on", name + ": heater_probe.csv header");
        const auto stats = nlohmann::json::parse(std::ifstream(dir / "stats.json"), nullptr, false);
        v.require(!stats.is_discarded() && stats.contains("events_executed") && stats.contains("queue_insertions") &&
                      stats.contains("wall_time_s") && stats.contains("sim_time_s"),
                  name + ": stats.json fields");
        for (SimTime t : config.snapshot_times) {
            const auto rows = read_lines(dir / snapshot_file_name(t));
            v.require(rows.size() == static_cast<std::size_t>(config.heater.n), name + ": snapshot row count");
        }
    }
    // The plotted figures come from these files: probe trace and crossings
    // (heater), level trace (tank), phases and jobs (system).
    v.require(read_lines(root / "heater" / "heater_probe.csv").size() > 1000, "heater probe trace too short");
    v.require(read_lines(root / "tank" / "tank.csv").size() > 2, "tank trace too short");
    fs::remove_all(root);
    return v;
}

}  // namespace

int main() {
    report(1, "heater steady state", steady_state);
    report(2, "heater event sequence and cooling", event_sequence);
    report(3, "stability and max principle", stability);
    report(4, "tank exactness and stale wakeups", tank_exactness);
    report(5, "system causality", causality);
    report(6, "determinism", determinism);
    report(7, "lookahead equivalence", lookahead_equivalence);
    report(8, "figures regenerable from artifacts", artifacts);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
