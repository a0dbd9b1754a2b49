#pragma once

#include "synclab/vector_field.hpp"

#include <cstddef>
#include <vector>

namespace synclab {

enum class Interpolation { Linear, CubicHermite };

/// Counters filled in by the integrators.
struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

/// Sampled solution curve. Between samples the curve is the cubic Hermite
/// interpolant built from the stored derivatives, or a linear one when no
/// derivatives were recorded.
class Trajectory {
 public:
  Trajectory() = default;

  /// Throws InvalidArgument unless the time grid is strictly increasing and
  /// sizes agree. `derivatives` may be empty.
  Trajectory(std::vector<double> times, std::vector<StateVec> states,
             std::vector<StateVec> derivatives = {});

  [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
  [[nodiscard]] bool empty() const noexcept { return times_.empty(); }
  [[nodiscard]] std::size_t dimension() const noexcept {
    return states_.empty() ? 0 : static_cast<std::size_t>(states_.front().size());
  }
  [[nodiscard]] double start_time() const { return times_.front(); }
  [[nodiscard]] double end_time() const { return times_.back(); }
  [[nodiscard]] Interpolation interpolation() const noexcept {
    return derivatives_.empty() ? Interpolation::Linear : Interpolation::CubicHermite;
  }

  [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
  [[nodiscard]] const std::vector<StateVec>& states() const noexcept { return states_; }
  [[nodiscard]] const std::vector<StateVec>& derivatives() const noexcept { return derivatives_; }
  [[nodiscard]] const StateVec& front() const { return states_.front(); }
  [[nodiscard]] const StateVec& back() const { return states_.back(); }

  /// Interpolated state. Throws OutOfRange outside [start_time, end_time].
  [[nodiscard]] StateVec at(double t) const;
  /// Derivative of the interpolant (exact stored derivative at grid points).
  [[nodiscard]] StateVec derivative_at(double t) const;

  /// Index k with times[k] <= t <= times[k+1]; throws OutOfRange.
  [[nodiscard]] std::size_t segment(double t) const;

  /// Component i at every grid point.
  [[nodiscard]] std::vector<double> component(std::size_t i) const;

  [[nodiscard]] const StepStats& stats() const noexcept { return stats_; }
  void set_stats(const StepStats& stats) noexcept { stats_ = stats; }

 private:
  std::vector<double> times_;
  std::vector<StateVec> states_;
  std::vector<StateVec> derivatives_;
  StepStats stats_;
};

}  // namespace synclab
