#include "hybridsim/recorder.hpp"

#include "json.hpp"

#include <charconv>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hybridsim {

std::string format_real(double value) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("cannot format number");
    return std::string(buf, end);
}

void EventLog::append(EventLogRecord record) {
    if (!records_.empty() && record.time < records_.back().time) {
        throw std::invalid_argument("event log record at t=" + format_real(record.time) +
                                    " precedes last record at t=" + format_real(records_.back().time));
    }
    records_.push_back(std::move(record));
}

void EventLog::write_jsonl(std::ostream& out) const {
    for (const auto& record : records_) {
        nlohmann::ordered_json line;
        line["t"] = record.time;
        line["source"] = record.source;
        line["kind"] = record.kind;
        line["detail"] = record.detail;
        out << line.dump() << '\n';
    }
}

std::string EventLog::to_jsonl() const {
    std::ostringstream out;
    write_jsonl(out);
    return out.str();
}

TimeSeries::TimeSeries(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void TimeSeries::append(SimTime time, std::vector<double> fields) {
    if (fields.size() != columns_.size()) throw std::invalid_argument("time series row has the wrong number of fields");
    if (!times_.empty() && time < times_.back()) {
        throw std::invalid_argument("time series row at t=" + format_real(time) + " precedes t=" +
                                    format_real(times_.back()));
    }
    times_.push_back(time);
    rows_.push_back(std::move(fields));
}

void TimeSeries::write_csv(std::ostream& out) const {
    out << "time_s";
    for (const auto& column : columns_) out << ',' << column;
    out << '\n';
    for (std::size_t row = 0; row < times_.size(); ++row) {
        out << format_real(times_[row]);
        for (double v : rows_[row]) out << ',' << format_real(v);
        out << '\n';
    }
}

std::string TimeSeries::to_csv() const {
    std::ostringstream out;
    write_csv(out);
    return out.str();
}

}  // namespace hybridsim
