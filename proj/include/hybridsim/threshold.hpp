#pragma once

#include "hybridsim/kernel.hpp"

#include <span>
#include <string>
#include <vector>

namespace hybridsim {

enum class Direction : std::uint8_t { Rising, Falling };

std::string_view to_string(Direction direction) noexcept;

struct Crossing {
    double threshold = 0.0;
    Direction direction = Direction::Rising;
    SimTime time = 0.0;

    bool operator==(const Crossing&) const = default;
};

/// Level-crossing detector over a sampled sequence.
///
/// Rising fires when last < threshold <= new, falling when last > threshold >= new.
/// Several thresholds passed in one sample are reported in traversal order.
class ThresholdDetector {
public:
    ThresholdDetector() = default;
    ThresholdDetector(std::vector<double> thresholds, double initial_value);

    std::vector<Crossing> detect(double new_value, SimTime t);

    std::span<const double> thresholds() const noexcept { return thresholds_; }
    double last_value() const noexcept { return last_value_; }

    bool operator==(const ThresholdDetector&) const = default;

private:
    std::vector<double> thresholds_;
    double last_value_ = 0.0;
};

}  // namespace hybridsim
