#pragma once

#include "hybridsim/kernel.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hybridsim {

struct EventLogRecord {
    SimTime time = 0.0;
    std::string source;
    std::string kind;
    std::string detail;

    bool operator==(const EventLogRecord&) const = default;
};

/// Append-only run log. Records must arrive in non-decreasing time order.
class EventLog {
public:
    void append(EventLogRecord record);
    const std::vector<EventLogRecord>& records() const noexcept { return records_; }

    /// One JSON object per line: {"t": seconds, "source", "kind", "detail"}.
    void write_jsonl(std::ostream& out) const;
    std::string to_jsonl() const;

private:
    std::vector<EventLogRecord> records_;
};

/// Time-indexed table with a fixed set of numeric columns after `time_s`.
class TimeSeries {
public:
    explicit TimeSeries(std::vector<std::string> columns = {});

    void append(SimTime time, std::vector<double> fields);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    SimTime time(std::size_t row) const { return times_.at(row); }
    double value(std::size_t row, std::size_t column) const { return rows_.at(row).at(column); }

    void write_csv(std::ostream& out) const;
    std::string to_csv() const;

private:
    std::vector<std::string> columns_;
    std::vector<SimTime> times_;
    std::vector<std::vector<double>> rows_;
};

/// Shortest decimal text that reads back to the same double.
std::string format_real(double value);

}  // namespace hybridsim
