#pragma once

#include "synclab/trajectory.hpp"
#include "synclab/vector_field.hpp"

#include <functional>

namespace synclab {

/// Master trajectory y0(t) the slave is synchronized to, together with the
/// master field psi. The derivative is always psi(t, y0(t)), never a difference
/// quotient of stored samples.
class Reference {
 public:
  using PathFn = std::function<StateVec(double)>;

  Reference(VectorField master, PathFn path, double t_begin, double t_end);

  /// Uses the trajectory's dense interpolant for y0.
  [[nodiscard]] static Reference from_trajectory(VectorField master, Trajectory trajectory);

  /// Throws OutOfRange outside [begin, end].
  [[nodiscard]] StateVec state(double t) const;
  [[nodiscard]] StateVec derivative(double t) const { return master_(t, state(t)); }
  [[nodiscard]] StateVec derivative(double t, const StateVec& y) const { return master_(t, y); }

  [[nodiscard]] const VectorField& master() const noexcept { return master_; }
  [[nodiscard]] double begin() const noexcept { return begin_; }
  [[nodiscard]] double end() const noexcept { return end_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return master_.dimension(); }

 private:
  VectorField master_;
  PathFn path_;
  double begin_;
  double end_;
};

}  // namespace synclab
