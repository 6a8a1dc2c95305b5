#include "hybridsim/heater.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace hybridsim {

namespace {

std::string format_number(double value) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

}  // namespace

void HeaterParams::validate() const {
    if (!std::isfinite(alpha) || alpha <= 0.0) throw std::invalid_argument("heater alpha must be > 0");
    if (!std::isfinite(side_length) || side_length <= 0.0) throw std::invalid_argument("heater side length must be > 0");
    if (n < 3) throw std::invalid_argument("heater grid needs n >= 3");
    if (!(low_temp < high_temp)) throw std::invalid_argument("heater low_temp must be below high_temp");
    if (probe_i < 1 || probe_i > n - 2 || probe_j < 1 || probe_j > n - 2) {
        throw std::invalid_argument("heater probe must be an interior grid point");
    }
    for (std::size_t k = 1; k < thresholds.size(); ++k) {
        if (!(thresholds[k - 1] < thresholds[k])) throw std::invalid_argument("heater thresholds must be strictly ascending");
    }
}

double stable_dt(const HeaterParams& params) noexcept {
    const double h = params.spacing();
    return h * h / (4.0 * params.alpha);
}

NumericalDivergence::NumericalDivergence(const std::string& entity, SimTime time)
    : std::runtime_error("numerical divergence in '" + entity + "' at t=" + format_number(time) + " s"),
      entity_(entity),
      time_(time) {}

void apply_boundary(Grid& grid, const HeaterParams& params, bool heater_on) noexcept {
    const int n = grid.size();
    const double coil = heater_on ? params.high_temp : params.low_temp;
    for (int i = 0; i < n; ++i) {
        grid(i, 0) = coil;
        grid(i, n - 1) = coil;
    }
    for (int j = 0; j < n; ++j) {
        grid(0, j) = params.low_temp;
        grid(n - 1, j) = params.low_temp;
    }
}

Heater::Heater(std::string name, HeaterParams params, SimTime t0)
    : ContinuousEntity(std::move(name)),
      params_(std::move(params)),
      dt_(0.0),
      h2_(0.0),
      last_update_(t0) {
    params_.validate();
    dt_ = stable_dt(params_);
    h2_ = params_.spacing() * params_.spacing();
    grid_ = Grid(params_.n, params_.low_temp);
    scratch_ = grid_;
    apply_boundary(grid_, params_, heater_on_);
    detector_ = ThresholdDetector(params_.thresholds, probe_value());
}

void Heater::fe_step(SimTime dt_sub) {
    if (!(dt_sub > 0.0)) throw std::invalid_argument("heater step must be positive");
    if (dt_sub > dt_) {
        throw std::invalid_argument("heater step " + format_number(dt_sub) + " s exceeds stability limit " +
                                    format_number(dt_) + " s");
    }
    const int n = params_.n;
    const double gamma = params_.alpha * dt_sub / h2_;
    bool finite = true;
    for (int i = 1; i < n - 1; ++i) {
        for (int j = 1; j < n - 1; ++j) {
            const double u = grid_(i, j);
            const double next =
                u + gamma * (grid_(i + 1, j) + grid_(i - 1, j) + grid_(i, j + 1) + grid_(i, j - 1) - 4.0 * u);
            finite = finite && std::isfinite(next);
            scratch_(i, j) = next;
        }
    }
    last_update_ += dt_sub;
    if (!finite) throw NumericalDivergence(name(), last_update_);
    std::swap(grid_, scratch_);
    apply_boundary(grid_, params_, heater_on_);
    ++steps_;
}

std::vector<Emission> Heater::update_to(SimTime t) {
    if (!(t >= last_update_)) throw std::invalid_argument("heater update_to called with a time in the past");
    const SimTime remaining = t - last_update_;
    if (remaining > 0.0) {
        // Spans that are a whole number of steps up to round-off take no partial step.
        const double ratio = remaining / dt_;
        const double nearest = std::round(ratio);
        long long full = 0;
        SimTime partial = 0.0;
        if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) {
            full = static_cast<long long>(nearest);
        } else {
            full = static_cast<long long>(std::floor(ratio));
            partial = remaining - static_cast<double>(full) * dt_;
        }
        for (long long k = 0; k < full; ++k) fe_step(dt_);
        if (partial > 0.0) fe_step(std::min(partial, dt_));
    }
    last_update_ = t;

    std::vector<Emission> out;
    for (const auto& crossing : detector_.detect(probe_value(), t)) {
        out.push_back({crossing_tag(crossing.threshold, crossing.direction),
                       "probe crossed " + format_number(crossing.threshold) + " " +
                           std::string(to_string(crossing.direction)),
                       t});
    }
    return out;
}

void Heater::set_power(bool on) noexcept {
    if (heater_on_ == on) return;
    heater_on_ = on;
    apply_boundary(grid_, params_, heater_on_);
}

std::uint64_t Heater::state_hash() const {
    const auto values = grid_.values();
    return StateHasher{}
        .add_bytes(values.data(), values.size_bytes())
        .add(heater_on_)
        .add(last_update_)
        .add(detector_.last_value())
        .value();
}

std::string Heater::crossing_tag(double threshold, Direction direction) {
    return std::string(to_string(direction)) + "@" + format_number(threshold);
}

}  // namespace hybridsim
