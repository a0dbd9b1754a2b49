#pragma once

#include "synclab/trajectory.hpp"
#include "synclab/vector_field.hpp"

#include <cstddef>
#include <functional>

namespace synclab {

/// Called after every accepted step; may throw to abort the integration.
using StepObserver = std::function<void(double t, const StateVec& x)>;

/// One classical RK4 step.
[[nodiscard]] StateVec rk4_step(const VectorField& field, double t, const StateVec& x, double h);

/// Classical RK4 on [t0, t1]. The step actually used is (t1 - t0) / ceil((t1 - t0) / h),
/// so the grid is uniform and lands exactly on t1.
/// Throws NonFiniteState if a step produces NaN/Inf.
[[nodiscard]] Trajectory integrate_fixed(const VectorField& field, const StateVec& x0, double t0,
                                         double t1, double h, const StepObserver& observer = {});

struct AdaptiveOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_max = 0.0;   // 0 means no cap beyond the interval length
  double h_init = 0.0;  // 0 means automatic
  std::size_t max_steps = 50'000'000;
  StepObserver observer;
};

/// Dormand-Prince 5(4) with local extrapolation. Each accepted step satisfies
/// max_i |err_i| / (atol + rtol * max(|x_i|, |x_new_i|)) <= 1. Stored derivatives
/// give cubic Hermite dense output.
/// Throws StepUnderflow when the controller asks for a step below 1e-14 and
/// NonFiniteState on NaN/Inf.
[[nodiscard]] Trajectory integrate_adaptive(const VectorField& field, const StateVec& x0, double t0,
                                            double t1, const AdaptiveOptions& options = {});

/// Convenience overload matching the (rtol, atol, h_max) calling convention.
[[nodiscard]] Trajectory integrate_adaptive(const VectorField& field, const StateVec& x0, double t0,
                                            double t1, double rtol, double atol, double h_max);

}  // namespace synclab
