#pragma once

#include "synclab/trajectory.hpp"

#include <functional>
#include <vector>

namespace synclab {

enum class CrossingDirection { Up, Down, Both };

struct Crossing {
  double time;
  StateVec state;
  CrossingDirection direction;  // Up or Down, never Both
};

using ScalarFn = std::function<double(double t, const StateVec& x)>;

/// Roots of g(t, traj(t)) along the trajectory. Each sign change on the grid is
/// refined by bisection on the interpolant until the bracket is below 1e-10.
/// A zero exactly at the first grid point has no bracket and is not reported.
[[nodiscard]] std::vector<Crossing> detect_crossing(const Trajectory& traj, const ScalarFn& g,
                                                    CrossingDirection direction);

}  // namespace synclab
