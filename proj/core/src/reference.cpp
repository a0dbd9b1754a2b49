#include "synclab/reference.hpp"

#include "synclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace synclab {

Reference::Reference(VectorField master, PathFn path, double t_begin, double t_end)
    : master_(std::move(master)), path_(std::move(path)), begin_(t_begin), end_(t_end) {
  if (!path_) throw Error(ErrorKind::InvalidArgument, "reference needs a path");
  if (!(t_end > t_begin)) throw Error(ErrorKind::InvalidArgument, "reference span must be non-empty");
}

Reference Reference::from_trajectory(VectorField master, Trajectory trajectory) {
  auto shared = std::make_shared<const Trajectory>(std::move(trajectory));
  const double t0 = shared->start_time();
  const double t1 = shared->end_time();
  return Reference(std::move(master), [shared](double t) { return shared->at(t); }, t0, t1);
}

StateVec Reference::state(double t) const {
  // Allow for rounding in accumulated step times.
  const double slack = 1e-9 * std::max(1.0, std::abs(end_));
  if (t < begin_ - slack || t > end_ + slack) {
    throw Error(ErrorKind::OutOfRange, "reference queried at t = " + std::to_string(t) +
                                           " outside [" + std::to_string(begin_) + ", " +
                                           std::to_string(end_) + "]");
  }
  return path_(std::clamp(t, begin_, end_));
}

}  // namespace synclab
