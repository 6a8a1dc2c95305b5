#pragma once

#include "hybridsim/continuous.hpp"
#include "hybridsim/threshold.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace hybridsim {

struct HeaterParams {
    double alpha = 0.0005;       // thermal diffusivity, m^2/s
    double side_length = 1.0;    // m
    int n = 21;                  // grid points per side
    double high_temp = 100.0;    // heated edges when ON, degC
    double low_temp = 25.0;      // side edges, and heated edges when OFF
    int probe_i = 10;
    int probe_j = 10;
    std::vector<double> thresholds{35.0, 50.0};

    double spacing() const noexcept { return side_length / (n - 1); }

    /// Places the probe at the plate center (requires odd n).
    HeaterParams& center_probe() noexcept {
        probe_i = probe_j = (n - 1) / 2;
        return *this;
    }

    void validate() const;
};

/// Largest Forward-Euler step for the 5-point stencil: h^2 / (4 alpha).
double stable_dt(const HeaterParams& params) noexcept;

/// Thrown when the grid stops being finite; names the entity and the time.
class NumericalDivergence : public std::runtime_error {
public:
    NumericalDivergence(const std::string& entity, SimTime time);
    const std::string& entity() const noexcept { return entity_; }
    SimTime time() const noexcept { return time_; }

private:
    std::string entity_;
    SimTime time_;
};

/// Row-major N x N temperature field; entry (i, j) sits at (i h, j h).
class Grid {
public:
    Grid() = default;
    Grid(int n, double fill) : n_(n), values_(static_cast<std::size_t>(n) * n, fill) {}

    int size() const noexcept { return n_; }
    double& operator()(int i, int j) noexcept { return values_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const noexcept { return values_[static_cast<std::size_t>(i) * n_ + j]; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool operator==(const Grid&) const = default;

private:
    int n_ = 0;
    std::vector<double> values_;
};

/// Dirichlet edges: j = 0 and j = N-1 carry the coil temperature, i = 0 and
/// i = N-1 stay at low_temp. Side edges are written last, so corners are low.
void apply_boundary(Grid& grid, const HeaterParams& params, bool heater_on) noexcept;

/// 2D hot plate solved with explicit Forward Euler on a uniform grid.
/// Wakes up every stable_dt; updates to other instants end with a shorter
/// partial step. The probe is sampled once per update for threshold crossings.
class Heater final : public ContinuousEntity {
public:
    Heater(std::string name, HeaterParams params, SimTime t0 = 0.0);

    SimTime last_update_time() const override { return last_update_; }
    WakeupPolicy wakeup_policy() const override { return FixedStep{dt_}; }
    std::vector<Emission> update_to(SimTime t) override;
    std::optional<Prediction> predict_next_event() const override { return std::nullopt; }
    double probe_value() const override { return grid_(params_.probe_i, params_.probe_j); }
    std::uint64_t state_hash() const override;
    std::unique_ptr<ContinuousEntity> clone() const override { return std::make_unique<Heater>(*this); }

    /// One explicit step of `dt_sub` seconds; rejects dt_sub > stable_dt.
    void fe_step(SimTime dt_sub);

    /// Switches the coil at last_update_time. Bring the heater up to the clock first.
    void set_power(bool on) noexcept;

    const HeaterParams& params() const noexcept { return params_; }
    const Grid& grid() const noexcept { return grid_; }
    bool heater_on() const noexcept { return heater_on_; }
    SimTime step_size() const noexcept { return dt_; }
    const ThresholdDetector& detector() const noexcept { return detector_; }
    std::uint64_t steps_taken() const noexcept { return steps_; }

    /// Tag used for crossing emissions, e.g. "rising@50".
    static std::string crossing_tag(double threshold, Direction direction);

private:
    HeaterParams params_;
    SimTime dt_;
    double h2_;
    Grid grid_;
    Grid scratch_;
    bool heater_on_ = false;
    SimTime last_update_;
    ThresholdDetector detector_;
    std::uint64_t steps_ = 0;
};

}  // namespace hybridsim
