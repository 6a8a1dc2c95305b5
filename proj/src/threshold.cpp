#include "hybridsim/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridsim {

std::string_view to_string(Direction direction) noexcept {
    return direction == Direction::Rising ? "rising" : "falling";
}

ThresholdDetector::ThresholdDetector(std::vector<double> thresholds, double initial_value)
    : thresholds_(std::move(thresholds)), last_value_(initial_value) {
    for (std::size_t k = 0; k < thresholds_.size(); ++k) {
        if (!std::isfinite(thresholds_[k])) throw std::invalid_argument("thresholds must be finite");
        if (k > 0 && !(thresholds_[k - 1] < thresholds_[k])) {
            throw std::invalid_argument("thresholds must be strictly ascending");
        }
    }
    if (!std::isfinite(initial_value)) throw std::invalid_argument("initial value must be finite");
}

std::vector<Crossing> ThresholdDetector::detect(double new_value, SimTime t) {
    if (!std::isfinite(new_value)) {
        throw std::domain_error("non-finite sample passed to threshold detector");
    }
    std::vector<Crossing> out;
    const double last = last_value_;
    if (new_value > last) {
        for (double thr : thresholds_) {
            if (last < thr && thr <= new_value) out.push_back({thr, Direction::Rising, t});
        }
    } else if (new_value < last) {
        for (auto it = thresholds_.rbegin(); it != thresholds_.rend(); ++it) {
            if (last > *it && *it >= new_value) out.push_back({*it, Direction::Falling, t});
        }
    }
    last_value_ = new_value;
    return out;
}

}  // namespace hybridsim
