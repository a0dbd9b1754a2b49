#include "synclab/trajectory.hpp"

#include "synclab/error.hpp"

#include <algorithm>
#include <string>

namespace synclab {

Trajectory::Trajectory(std::vector<double> times, std::vector<StateVec> states,
                       std::vector<StateVec> derivatives)
    : times_(std::move(times)), states_(std::move(states)), derivatives_(std::move(derivatives)) {
  if (times_.empty()) throw Error(ErrorKind::InvalidArgument, "trajectory needs at least one sample");
  if (states_.size() != times_.size()) {
    throw Error(ErrorKind::InvalidArgument, "trajectory times and states differ in length");
  }
  if (!derivatives_.empty() && derivatives_.size() != times_.size()) {
    throw Error(ErrorKind::InvalidArgument, "trajectory derivatives differ in length");
  }
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k] > times_[k - 1])) {
      throw Error(ErrorKind::InvalidArgument,
                  "trajectory time grid not strictly increasing at index " + std::to_string(k));
    }
  }
}

std::size_t Trajectory::segment(double t) const {
  if (empty() || t < times_.front() || t > times_.back()) {
    throw Error(ErrorKind::OutOfRange, "query time " + std::to_string(t) + " outside trajectory span [" +
                                           std::to_string(empty() ? 0.0 : times_.front()) + ", " +
                                           std::to_string(empty() ? 0.0 : times_.back()) + "]");
  }
  if (times_.size() == 1) return 0;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  auto k = static_cast<std::size_t>(std::distance(times_.begin(), it));
  if (k == 0) return 0;
  return std::min(k - 1, times_.size() - 2);
}

StateVec Trajectory::at(double t) const {
  const std::size_t k = segment(t);
  if (times_.size() == 1) return states_.front();
  const double t0 = times_[k];
  const double h = times_[k + 1] - t0;
  const double s = (t - t0) / h;
  if (derivatives_.empty()) return (1.0 - s) * states_[k] + s * states_[k + 1];
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * states_[k] + (h10 * h) * derivatives_[k] + h01 * states_[k + 1] +
         (h11 * h) * derivatives_[k + 1];
}

StateVec Trajectory::derivative_at(double t) const {
  const std::size_t k = segment(t);
  if (times_.size() == 1) {
    return derivatives_.empty() ? StateVec::Zero(states_.front().size()) : derivatives_.front();
  }
  const double t0 = times_[k];
  const double h = times_[k + 1] - t0;
  const double s = (t - t0) / h;
  if (derivatives_.empty()) return (states_[k + 1] - states_[k]) / h;
  const double s2 = s * s;
  const double d00 = (6.0 * s2 - 6.0 * s) / h;
  const double d10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double d01 = (-6.0 * s2 + 6.0 * s) / h;
  const double d11 = 3.0 * s2 - 2.0 * s;
  return d00 * states_[k] + d10 * derivatives_[k] + d01 * states_[k + 1] + d11 * derivatives_[k + 1];
}

std::vector<double> Trajectory::component(std::size_t i) const {
  std::vector<double> out;
  out.reserve(states_.size());
  for (const auto& x : states_) out.push_back(x[static_cast<Eigen::Index>(i)]);
  return out;
}

}  // namespace synclab
