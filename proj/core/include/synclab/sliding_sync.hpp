#pragma once

#include "synclab/limit_cycle.hpp"
#include "synclab/reference.hpp"
#include "synclab/sync_report.hpp"
#include "synclab/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace synclab {

enum class SlidingMode {
  /// RK4 on the discontinuous right-hand side; shows chattering.
  Raw,
  /// Componentwise equivalent dynamics on e_i = 0 while the sliding condition holds.
  FilippovSliding,
};

/// Coupling B sgn(x - y0(t)) with B = diag(gains), all gains negative.
class StaticFeedback {
 public:
  /// Throws InvalidArgument unless every gain is negative.
  explicit StaticFeedback(std::vector<double> gains, SlidingMode mode = SlidingMode::Raw);

  [[nodiscard]] const std::vector<double>& gains() const noexcept { return gains_; }
  [[nodiscard]] SlidingMode mode() const noexcept { return mode_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return gains_.size(); }

 private:
  std::vector<double> gains_;
  SlidingMode mode_;
};

/// Lyapunov function V(e) = sum_i |e_i|.
[[nodiscard]] double lyapunov_l1(const StateVec& e);

/// phi(t, x) + B sgn(x - y0(t)) with sgn(0) = 0.
[[nodiscard]] StateVec coupled_static_rhs(const StaticFeedback& fb, const VectorField& slave,
                                          const Reference& reference, double t, const StateVec& x);

/// Sign-switch times of each error component.
struct SwitchLog {
  std::vector<std::vector<double>> times;

  [[nodiscard]] std::size_t dimension() const noexcept { return times.size(); }
  [[nodiscard]] std::size_t count(std::size_t component, double t_begin, double t_end) const;
};

/// Switches per unit time in [t_begin, t_end), per component.
[[nodiscard]] std::vector<double> chattering_rate(const SwitchLog& log, double t_begin, double t_end);

/// V below this counts as exact surface contact.
inline constexpr double kContactTolerance = 1e-12;

struct StaticSimOptions {
  double step = 1e-4;
  double hit_tolerance = 1e-3;  // V_tol
  /// Initial-condition box I. When set, leaving its 10x inflation raises DomainExceeded.
  std::optional<Box> box;
  double domain_inflation = 10.0;
  /// Optional additive disturbance d(t, x) on the slave.
  VectorField::EvalFn disturbance;
};

struct StaticRun {
  Trajectory trajectory;
  std::vector<double> lyapunov;  // V(e) at every grid point
  SwitchLog switches;
  /// Per component: first grid time with |e_i| <= V_tol / n, if reached.
  std::vector<std::optional<double>> component_hits;
  std::optional<double> hitting_time;  // first t with V <= V_tol
  std::optional<double> contact_time;  // first t with V <= kContactTolerance (every e_i on its surface)
  SyncReport report;
};

/// Fixed-step simulation of x' = phi(t, x) + B sgn(x - y0(t)).
///
/// In Raw mode every RK4 stage sees the true sign. In FilippovSliding mode a
/// component whose error changes sign within a step, and whose sliding
/// condition |phi_i - psi_i| < |b_i| holds, is pinned to e_i = 0 and afterwards
/// follows y0_i until the condition fails; non-sliding components use the sign
/// frozen at the start of the step.
[[nodiscard]] StaticRun simulate_static(const StaticFeedback& fb, const VectorField& slave,
                                        const Reference& reference, const StateVec& x0, double t_end,
                                        const StaticSimOptions& options = {});

/// Sampled estimate of the bound M_I and the resulting finite-time guarantee.
struct GainCertificate {
  double m_bound = 0.0;       // M_I (safety factor included)
  double mu = 0.0;            // mu_I = max_i (M_I + b_i)
  double t_hit_bound = 0.0;   // worst case over the box corners, -V_max / mu_I
  Box box;                    // initial set I
  Box sample_region;          // region the sup was taken over
  std::size_t samples = 0;
  bool valid = false;         // mu_I < 0

  /// -V(e(0)) / mu_I for a given start. Throws GainTooSmall when invalid.
  [[nodiscard]] double hit_bound(const StateVec& x0, const StateVec& y0_at_0) const;
};

struct CertifyOptions {
  std::size_t samples = 10'000;
  std::uint64_t seed = 0x5eed;
  double horizon = 0.0;         // t drawn uniformly from [reference.begin, begin + horizon]; 0 = whole reference
  double region_inflation = 2.0;
  double safety_factor = 1.25;
  /// Added to the sampled sup, e.g. a known disturbance bound.
  double extra_bound = 0.0;
};

/// M_I = safety * max |phi_i(t, x) - psi_i(t, y0(t))| over random (t, x) with x in
/// the inflated hull of I and range(y0). Never throws for small gains; the
/// returned certificate is marked invalid instead (see require_valid_gains).
[[nodiscard]] GainCertificate certify_gains(const StaticFeedback& fb, const VectorField& slave,
                                            const Reference& reference, const Box& box,
                                            const CertifyOptions& options = {});

/// Throws GainTooSmall when the certificate is invalid.
void require_valid_gains(const GainCertificate& certificate);

}  // namespace synclab
