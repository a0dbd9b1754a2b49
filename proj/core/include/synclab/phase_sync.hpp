#pragma once

#include "synclab/limit_cycle.hpp"
#include "synclab/sync_report.hpp"
#include "synclab/trajectory.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace synclab {

/// Number of quadrature nodes used for one-period L2 integrals.
inline constexpr std::size_t kDistanceSamples = 4096;

/// D(s) = int_0^T |x0(tau + s) - y0(tau)|^2 dtau by the periodic trapezoid rule,
/// with T the master period. Throws PeriodMismatch when the periods differ by
/// more than 1e-6 relative.
[[nodiscard]] double distance_integral(const LimitCycle& slave, const LimitCycle& master, double shift,
                                       std::size_t samples = kDistanceSamples);

struct ThetaStar {
  double theta0 = 0.0;  // argmin of D over [0, T)
  double dmin = 0.0;    // D(theta0)
};

/// Argmin of D: 512-point scan then golden-section refinement to 1e-8.
/// Throws NonUniqueMin when a second, grid-separated local minimum matches the
/// global one within 1e-6.
[[nodiscard]] ThetaStar theta_star(const LimitCycle& slave, const LimitCycle& master);

struct MalkinRoot {
  double theta = 0.0;
  double slope = 0.0;  // F'(theta) by centered difference
};

/// F_delta(theta) = D(theta) - D_min - T * delta on a uniform grid over [0, T].
struct MalkinProfile {
  double period = 0.0;
  double delta = 0.0;
  double theta0 = 0.0;
  double dmin = 0.0;
  std::vector<double> theta;   // grid, inclusive of both endpoints
  std::vector<double> values;  // F_delta on the grid
  std::vector<MalkinRoot> roots;

  /// Root with F' > 0 closest (cyclically) to theta0, if any.
  [[nodiscard]] std::optional<MalkinRoot> increasing_root() const;
  /// Cyclic distance between two phases.
  [[nodiscard]] double phase_distance(double a, double b) const;
};

[[nodiscard]] MalkinProfile malkin_F(const LimitCycle& slave, const LimitCycle& master, double delta,
                                     std::size_t grid = 512);

/// Parameters of the coupled system
///   x' = f(x) + eps (|x - y0(t)|^2 - D_min / T - delta) f(x).
class PhaseCoupling {
 public:
  /// Computes D_min via theta_star. Throws InvalidArgument for eps < 0 or
  /// delta < 0 and PeriodMismatch when the periods disagree.
  PhaseCoupling(LimitCycle slave, LimitCycle master, double epsilon, double delta);

  [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
  [[nodiscard]] double delta() const noexcept { return delta_; }
  [[nodiscard]] double dmin() const noexcept { return dmin_; }
  [[nodiscard]] double theta0() const noexcept { return theta0_; }
  [[nodiscard]] double period() const noexcept { return master_.period(); }
  [[nodiscard]] const LimitCycle& slave() const noexcept { return slave_; }
  [[nodiscard]] const LimitCycle& master() const noexcept { return master_; }

  /// Same cycles and D_min with a different coupling strength.
  [[nodiscard]] PhaseCoupling with_epsilon(double epsilon) const;

 private:
  LimitCycle slave_;
  LimitCycle master_;
  double epsilon_;
  double delta_;
  double dmin_ = 0.0;
  double theta0_ = 0.0;
};

[[nodiscard]] StateVec coupled_phase_rhs(const PhaseCoupling& coupling, double t, const StateVec& x);
[[nodiscard]] VectorField coupled_phase_field(const PhaseCoupling& coupling);

/// Signed shift s in [-T/2, T/2) minimizing int_{t0}^{t0+T} |x(tau) - y0(tau + s)|^2 dtau
/// (512 shifts, parabolic refinement).
[[nodiscard]] double phase_lag(const Trajectory& x, const LimitCycle& master, double t_begin);

struct PhaseSyncOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step_fraction = 1.0 / 200.0;  // of the period
};

struct PhaseSyncRun {
  Trajectory trajectory;
  std::vector<double> lags;  // one per period
  SyncReport report;
};

/// Integrates the coupled system over n_periods * T. The report carries the lag
/// per period (series "phase_lag") and the residual |int |x - y0|^2 - D_min| over
/// the final period (scalar "prop_residual").
[[nodiscard]] PhaseSyncRun simulate_phase_sync(const PhaseCoupling& coupling, const StateVec& x_init,
                                               int n_periods, const PhaseSyncOptions& options = {});

}  // namespace synclab
