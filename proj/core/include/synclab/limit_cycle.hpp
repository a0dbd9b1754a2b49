#pragma once

#include "synclab/trajectory.hpp"
#include "synclab/vector_field.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace synclab {

/// Axis-aligned box [lower, upper].
struct Box {
  StateVec lower;
  StateVec upper;

  [[nodiscard]] bool contains(const StateVec& x) const;
  /// Same center, half-widths scaled by `factor`.
  [[nodiscard]] Box inflated(double factor) const;
};

/// Periodic orbit x0(t) of an autonomous field, anchored at x0(0).
class LimitCycle {
 public:
  LimitCycle(VectorField field, double period, Trajectory orbit);

  [[nodiscard]] const VectorField& field() const noexcept { return field_; }
  [[nodiscard]] double period() const noexcept { return period_; }
  [[nodiscard]] const Trajectory& orbit() const noexcept { return orbit_; }
  [[nodiscard]] const StateVec& anchor() const { return orbit_.front(); }
  [[nodiscard]] double closure() const;

  /// x0(t) for any real t, using periodicity.
  [[nodiscard]] StateVec state_at(double t) const;
  /// f(x0(t)).
  [[nodiscard]] StateVec velocity_at(double t) const;
  /// t reduced into [0, T).
  [[nodiscard]] double wrap(double t) const;

  /// The same cycle re-anchored at x0(phase).
  [[nodiscard]] LimitCycle shifted(double phase) const;
  /// Re-anchored at the orbit point nearest to `point`; returns the shift used.
  [[nodiscard]] std::pair<LimitCycle, double> anchored_near(const StateVec& point) const;

 private:
  VectorField field_;
  double period_;
  Trajectory orbit_;
};

struct LimitCycleOptions {
  std::optional<Box> bounding_box;
  double burn_in_periods = 20.0;
  double rtol = 1e-11;
  double atol = 1e-12;
  int max_newton_steps = 50;
  double closure_tol = 1e-8;
  /// Upper bound on the output grid spacing as a fraction of the period.
  double max_sample_fraction = 1.0 / 2000.0;
};

/// Shooting on a Poincare section through the relaxed seed.
///
/// The seed is first relaxed for `burn_in_periods * T_guess`. The section is the
/// hyperplane through the relaxed point orthogonal to the flow there, and the
/// initial period is the first same-direction return after 0.5 * T_guess.
/// Newton then solves phi_T(x) = x together with the section condition.
///
/// Errors: NoConvergence (including singular Newton systems from non-isolated
/// cycles), TransientEscape when the relaxation leaves the bounding box or blows up.
[[nodiscard]] LimitCycle find_limit_cycle(const VectorField& field, const StateVec& seed,
                                          double period_guess,
                                          const LimitCycleOptions& options = {});

struct FloquetData {
  Matrix monodromy;
  std::vector<std::complex<double>> multipliers;  // sorted by decreasing modulus

  /// Index of the multiplier closest to 1.
  [[nodiscard]] std::size_t trivial_index() const;
};

/// Y(T) from Y' = f'(x0(t)) Y, Y(0) = I, integrated together with the orbit.
[[nodiscard]] FloquetData monodromy(const LimitCycle& cycle, double rtol = 1e-11,
                                    double atol = 1e-12);

/// T-periodic solution of z' = -f'(x0(t))^T z with <z(t), x0'(t)> = 1.
class AdjointCycle {
 public:
  AdjointCycle(double period, Trajectory adjoint) : period_(period), adjoint_(std::move(adjoint)) {}

  [[nodiscard]] double period() const noexcept { return period_; }
  [[nodiscard]] const Trajectory& trajectory() const noexcept { return adjoint_; }
  [[nodiscard]] StateVec at(double t) const;

 private:
  double period_;
  Trajectory adjoint_;
};

/// z*(0) is the eigenvector of monodromy^T for the multiplier 1, scaled so that
/// <z*(0), f(x0(0))> = 1; the rest of the period comes from integrating the
/// adjoint equation forward alongside the orbit.
/// Throws DegenerateMultiplier when more than one multiplier lies within 1e-3 of 1.
[[nodiscard]] AdjointCycle adjoint_cycle(const LimitCycle& cycle, double rtol = 1e-11,
                                         double atol = 1e-12);

}  // namespace synclab
