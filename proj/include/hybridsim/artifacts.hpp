#pragma once

#include "hybridsim/scenario.hpp"

#include <filesystem>
#include <string>

namespace hybridsim {

std::string stats_json(const RunStats& stats, SchedulerMode mode);

/// Row-major grid, one line per row i, values j = 0..N-1.
std::string snapshot_csv(const Grid& grid);

std::string snapshot_file_name(SimTime time);

/// Writes events.jsonl, tank.csv, heater_probe.csv, stats.json and one
/// snapshot_<seconds>.csv per snapshot into `dir` (created if missing).
void write_run_artifacts(const RunResult& result, SchedulerMode mode, const std::filesystem::path& dir);

}  // namespace hybridsim
