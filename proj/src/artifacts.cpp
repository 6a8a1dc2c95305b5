#include "hybridsim/artifacts.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hybridsim {

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << contents;
}

}  // namespace

std::string stats_json(const RunStats& stats, SchedulerMode mode) {
    nlohmann::ordered_json j;
    j["events_executed"] = stats.events_executed;
    j["queue_insertions"] = stats.queue_insertions;
    j["wall_time_s"] = stats.wall_time_s;
    j["sim_time_s"] = stats.sim_time_s;
    j["scheduler"] = std::string(to_string(mode));
    j["iterations"] = stats.iterations;
    j["peeks"] = stats.peeks;
    j["rollbacks"] = stats.rollbacks;
    j["stale_wakeups"] = stats.stale_wakeups;
    return j.dump(2) + "\n";
}

std::string snapshot_csv(const Grid& grid) {
    std::ostringstream out;
    for (int i = 0; i < grid.size(); ++i) {
        for (int j = 0; j < grid.size(); ++j) {
            if (j > 0) out << ',';
            out << format_real(grid(i, j));
        }
        out << '\n';
    }
    return out.str();
}

std::string snapshot_file_name(SimTime time) { return "snapshot_" + format_real(time) + ".csv"; }

void write_run_artifacts(const RunResult& result, SchedulerMode mode, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "events.jsonl", result.log.to_jsonl());
    write_file(dir / "tank.csv", result.tank_series.to_csv());
    write_file(dir / "heater_probe.csv", result.probe_series.to_csv());
    write_file(dir / "stats.json", stats_json(result.stats, mode));
    for (const auto& snapshot : result.snapshots) {
        write_file(dir / snapshot_file_name(snapshot.time), snapshot_csv(snapshot.grid));
    }
}

}  // namespace hybridsim
