#include "hybridsim/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hybridsim {

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string{}) +
                         (field.empty() ? std::string{} : "field '" + field + "': ") + message),
      line_(line),
      field_(std::move(field)) {}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view s) {
    bool in_string = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '"') in_string = !in_string;
        if (s[k] == '#' && !in_string) return s.substr(0, k);
    }
    return s;
}

bool parse_number(std::string_view text, double& out) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    std::string cleaned;
    for (char c : text) {
        if (c != '_') cleaned.push_back(c);
    }
    const char* first = cleaned.data();
    const char* last = first + cleaned.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

ConfigValue parse_value(std::string_view text, int line, const std::string& field) {
    text = trim(text);
    if (text.empty()) throw ConfigError(line, field, "missing value");
    if (text == "true") return {true, line};
    if (text == "false") return {false, line};
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"') throw ConfigError(line, field, "unterminated string");
        return {std::string(text.substr(1, text.size() - 2)), line};
    }
    if (text.front() == '[') {
        if (text.back() != ']') throw ConfigError(line, field, "unterminated array");
        std::vector<double> items;
        std::string_view body = trim(text.substr(1, text.size() - 2));
        while (!body.empty()) {
            const auto comma = body.find(',');
            const auto item = trim(body.substr(0, comma));
            if (!item.empty()) {
                double v = 0.0;
                if (!parse_number(item, v)) throw ConfigError(line, field, "array items must be numbers");
                items.push_back(v);
            } else if (comma != std::string_view::npos) {
                throw ConfigError(line, field, "empty array item");
            }
            if (comma == std::string_view::npos) break;
            body = trim(body.substr(comma + 1));
        }
        return {std::move(items), line};
    }
    double v = 0.0;
    if (!parse_number(text, v)) throw ConfigError(line, field, "cannot parse value '" + std::string(text) + "'");
    return {v, line};
}

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"run", {"scenario", "t_end_min", "seed", "scheduler", "snapshots"}},
        {"heater", {"alpha", "n", "high_temp", "low_temp", "probe", "thresholds"}},
        {"tank", {"max_level", "inflow_rate_per_min", "outflow_rate_per_min", "initial_level"}},
        {"jobs", {"duration_min", "duration_max", "interarrival_min", "interarrival_max", "ready_threshold"}},
        {"schedule",
         {"cycle_period_min", "on_duration_min", "cycles", "random_min", "random_max", "valve_toggle_min",
          "valve_toggle_max"}},
    };
    return keys;
}

class Reader {
public:
    explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

    const ConfigValue* find(const std::string& section, const std::string& key) const {
        return doc_.find(section, key);
    }

    const ConfigValue& require(const std::string& section, const std::string& key) const {
        const auto* value = find(section, key);
        if (!value) throw ConfigError(0, section + "." + key, "required field is missing");
        return *value;
    }

    template <typename T>
    const T& as(const ConfigValue& value, const std::string& field, const char* type) const {
        if (const auto* typed = std::get_if<T>(&value.data)) return *typed;
        throw ConfigError(value.line, field, std::string("expected ") + type);
    }

    void number(const std::string& section, const std::string& key, double& out) const {
        if (const auto* value = find(section, key)) out = as<double>(*value, section + "." + key, "a number");
    }

    void integer(const std::string& section, const std::string& key, long long& out) const {
        if (const auto* value = find(section, key)) {
            const double v = as<double>(*value, section + "." + key, "an integer");
            if (v != std::floor(v)) throw ConfigError(value->line, section + "." + key, "expected an integer");
            out = static_cast<long long>(v);
        }
    }

    void numbers(const std::string& section, const std::string& key, std::vector<double>& out) const {
        if (const auto* value = find(section, key)) {
            out = as<std::vector<double>>(*value, section + "." + key, "an array of numbers");
        }
    }

    int line_of(const std::string& section, const std::string& key) const {
        const auto* value = find(section, key);
        return value ? value->line : 0;
    }

private:
    const ConfigDocument& doc_;
};

}  // namespace

ConfigDocument ConfigDocument::parse(std::string_view text) {
    ConfigDocument doc;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        const auto raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        const auto line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "", "malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!schema().contains(section)) throw ConfigError(line_no, section, "unknown section");
            doc.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        if (section.empty()) throw ConfigError(line_no, key, "key outside of a section");
        const std::string field = section + "." + key;
        if (!schema().at(section).contains(key)) throw ConfigError(line_no, field, "unknown field");
        auto& entries = doc.sections_[section];
        if (entries.contains(key)) throw ConfigError(line_no, field, "duplicate field");
        entries.emplace(key, parse_value(line.substr(eq + 1), line_no, field));
    }
    return doc;
}

const ConfigValue* ConfigDocument::find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

ScenarioConfig scenario_from_document(const ConfigDocument& document) {
    const Reader in(document);
    ScenarioConfig config;

    const auto& scenario_value = in.require("run", "scenario");
    const auto& scenario_name = in.as<std::string>(scenario_value, "run.scenario", "a string");
    const auto kind = parse_scenario_kind(scenario_name);
    if (!kind) throw ConfigError(scenario_value.line, "run.scenario", "unknown scenario '" + scenario_name + "'");
    config.kind = *kind;

    const auto& t_end_value = in.require("run", "t_end_min");
    config.t_end = in.as<double>(t_end_value, "run.t_end_min", "a number") * kSecondsPerMinute;

    long long seed = static_cast<long long>(config.seed);
    in.integer("run", "seed", seed);
    if (seed < 0) throw ConfigError(in.line_of("run", "seed"), "run.seed", "must be non-negative");
    config.seed = static_cast<std::uint64_t>(seed);

    if (const auto* value = in.find("run", "scheduler")) {
        const auto& name = in.as<std::string>(*value, "run.scheduler", "a string");
        const auto mode = parse_scheduler_mode(name);
        if (!mode) throw ConfigError(value->line, "run.scheduler", "unknown scheduler '" + name + "'");
        config.scheduler = *mode;
    }
    std::vector<double> snapshots_min;
    in.numbers("run", "snapshots", snapshots_min);
    for (double m : snapshots_min) config.snapshot_times.push_back(m * kSecondsPerMinute);

    auto& heater = config.heater;
    in.number("heater", "alpha", heater.alpha);
    long long n = heater.n;
    in.integer("heater", "n", n);
    heater.n = static_cast<int>(n);
    heater.center_probe();
    in.number("heater", "high_temp", heater.high_temp);
    in.number("heater", "low_temp", heater.low_temp);
    if (const auto* value = in.find("heater", "probe")) {
        const auto& probe = in.as<std::vector<double>>(*value, "heater.probe", "an [i, j] array");
        if (probe.size() != 2 || probe[0] != std::floor(probe[0]) || probe[1] != std::floor(probe[1])) {
            throw ConfigError(value->line, "heater.probe", "expected two integer grid indices");
        }
        heater.probe_i = static_cast<int>(probe[0]);
        heater.probe_j = static_cast<int>(probe[1]);
    }
    in.numbers("heater", "thresholds", heater.thresholds);

    double inflow = config.tank.inflow_rate * kSecondsPerMinute;
    double outflow = config.tank.outflow_rate * kSecondsPerMinute;
    in.number("tank", "max_level", config.tank.max_level);
    in.number("tank", "inflow_rate_per_min", inflow);
    in.number("tank", "outflow_rate_per_min", outflow);
    config.tank.inflow_rate = inflow / kSecondsPerMinute;
    config.tank.outflow_rate = outflow / kSecondsPerMinute;
    config.initial_level = config.tank.max_level;
    in.number("tank", "initial_level", config.initial_level);

    in.number("jobs", "duration_min", config.job_duration.lo);
    in.number("jobs", "duration_max", config.job_duration.hi);
    in.number("jobs", "interarrival_min", config.job_interarrival.lo);
    in.number("jobs", "interarrival_max", config.job_interarrival.hi);
    in.number("jobs", "ready_threshold", config.ready_threshold);

    auto& schedule = config.heater_schedule;
    in.number("schedule", "cycle_period_min", schedule.cycle_period_min);
    in.number("schedule", "on_duration_min", schedule.on_duration_min);
    long long cycles = schedule.cycles;
    in.integer("schedule", "cycles", cycles);
    schedule.cycles = static_cast<int>(cycles);
    in.number("schedule", "random_min", schedule.random_interval.lo);
    in.number("schedule", "random_max", schedule.random_interval.hi);
    in.number("schedule", "valve_toggle_min", config.valve_toggle_interval.lo);
    in.number("schedule", "valve_toggle_max", config.valve_toggle_interval.hi);

    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, "", e.what());
    }
    return config;
}

ScenarioConfig parse_scenario_config(std::string_view text) {
    return scenario_from_document(ConfigDocument::parse(text));
}

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "", "cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_config(buffer.str());
}

namespace {

std::string array_text(const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k > 0) out += ", ";
        out += format_real(values[k]);
    }
    return out + "]";
}

}  // namespace

std::string serialize_scenario_config(const ScenarioConfig& config) {
    std::ostringstream out;
    std::vector<double> snapshots_min;
    for (SimTime t : config.snapshot_times) snapshots_min.push_back(t / kSecondsPerMinute);

    out << "[run]\n"
        << "scenario = \"" << to_string(config.kind) << "\"\n"
        << "t_end_min = " << format_real(config.t_end / kSecondsPerMinute) << "\n"
        << "seed = " << config.seed << "\n"
        << "scheduler = \"" << to_string(config.scheduler) << "\"\n"
        << "snapshots = " << array_text(snapshots_min) << "\n\n";

    const auto& heater = config.heater;
    out << "[heater]\n"
        << "alpha = " << format_real(heater.alpha) << "\n"
        << "n = " << heater.n << "\n"
        << "high_temp = " << format_real(heater.high_temp) << "\n"
        << "low_temp = " << format_real(heater.low_temp) << "\n"
        << "probe = [" << heater.probe_i << ", " << heater.probe_j << "]\n"
        << "thresholds = " << array_text(heater.thresholds) << "\n\n";

    out << "[tank]\n"
        << "max_level = " << format_real(config.tank.max_level) << "\n"
        << "inflow_rate_per_min = " << format_real(config.tank.inflow_rate * kSecondsPerMinute) << "\n"
        << "outflow_rate_per_min = " << format_real(config.tank.outflow_rate * kSecondsPerMinute) << "\n"
        << "initial_level = " << format_real(config.initial_level) << "\n\n";

    out << "[jobs]\n"
        << "duration_min = " << format_real(config.job_duration.lo) << "\n"
        << "duration_max = " << format_real(config.job_duration.hi) << "\n"
        << "interarrival_min = " << format_real(config.job_interarrival.lo) << "\n"
        << "interarrival_max = " << format_real(config.job_interarrival.hi) << "\n"
        << "ready_threshold = " << format_real(config.ready_threshold) << "\n\n";

    const auto& schedule = config.heater_schedule;
    out << "[schedule]\n"
        << "cycle_period_min = " << format_real(schedule.cycle_period_min) << "\n"
        << "on_duration_min = " << format_real(schedule.on_duration_min) << "\n"
        << "cycles = " << schedule.cycles << "\n"
        << "random_min = " << format_real(schedule.random_interval.lo) << "\n"
        << "random_max = " << format_real(schedule.random_interval.hi) << "\n"
        << "valve_toggle_min = " << format_real(config.valve_toggle_interval.lo) << "\n"
        << "valve_toggle_max = " << format_real(config.valve_toggle_interval.hi) << "\n";
    return out.str();
}

}  // namespace hybridsim
