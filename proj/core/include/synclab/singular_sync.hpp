#pragma once

#include "synclab/reference.hpp"
#include "synclab/sym_matrix.hpp"
#include "synclab/sync_report.hpp"
#include "synclab/trajectory.hpp"

#include <optional>

namespace synclab {

/// Parameters of the dynamic feedback
///   x' = phi(t, x) - B u,   eps u' = ds/dt + ds/dx [phi(t, x) - B u].
class DynamicFeedback {
 public:
  /// Throws InvalidArgument unless eps > 0, C is negative definite and the
  /// symmetric part of B is negative definite. alpha and nu are recorded from
  /// the eigenvalues.
  DynamicFeedback(Matrix b, SymMatrix c, double epsilon, StateVec xi0);

  [[nodiscard]] const Matrix& b() const noexcept { return b_; }
  [[nodiscard]] const Matrix& b_inverse() const noexcept { return b_inv_; }
  [[nodiscard]] const SymMatrix& c() const noexcept { return c_; }
  [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
  [[nodiscard]] const StateVec& xi0() const noexcept { return xi0_; }
  /// -max eigenvalue of C.
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  /// -max eigenvalue of (B + B^T) / 2.
  [[nodiscard]] double nu() const noexcept { return nu_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return static_cast<std::size_t>(xi0_.size()); }

  [[nodiscard]] DynamicFeedback with_epsilon(double epsilon) const;

 private:
  Matrix b_;
  Matrix b_inv_;
  SymMatrix c_;
  double epsilon_;
  StateVec xi0_;
  double alpha_ = 0.0;
  double nu_ = 0.0;
};

/// s(t, xi0, x) = e^{Ct} (xi0 - y0(0)) - (x - y0(t)).
class SFunction {
 public:
  SFunction(Reference reference, SymMatrix c, const StateVec& xi0);

  [[nodiscard]] const Reference& reference() const noexcept { return reference_; }
  [[nodiscard]] const StateVec& anchor_offset() const noexcept { return offset_; }
  [[nodiscard]] const SymMatrix& c() const noexcept { return c_; }

  /// e^{Ct} (xi0 - y0(0)).
  [[nodiscard]] StateVec decaying_offset(double t) const;

  [[nodiscard]] StateVec eval(double t, const StateVec& x) const;

  struct Partials {
    StateVec dt;  // C e^{Ct} (xi0 - y0(0)) + psi(t, y0(t))
    Matrix dx;    // -I
  };
  [[nodiscard]] Partials partials(double t, const StateVec& x) const;

 private:
  Reference reference_;
  SymMatrix c_;
  StateVec offset_;
};

struct DynamicRates {
  StateVec dx;
  StateVec du;
};

/// Optional additive perturbation p(t, x) on the slave.
using Perturbation = VectorField::EvalFn;

[[nodiscard]] DynamicRates coupled_dynamic_rhs(const DynamicFeedback& fb, const VectorField& slave,
                                               const SFunction& sf, double t, const StateVec& x,
                                               const StateVec& u, const Perturbation& p = {});

/// Frozen boundary-layer equilibrium
/// u(t, x) = -B^{-1} [C e^{Ct} (xi0 - y0(0)) + psi(t, y0(t)) - phi(t, x)].
[[nodiscard]] StateVec layer_equilibrium(const DynamicFeedback& fb, const VectorField& slave,
                                         const SFunction& sf, double t, const StateVec& x);

/// Closed-form reduced solution x0(t) = y0(t) + e^{Ct} (xi0 - y0(0)).
[[nodiscard]] StateVec reduced_solution(const DynamicFeedback& fb, const Reference& reference, double t);

/// Equivalent control u0(t): the layer equilibrium evaluated on x0(t).
/// Throws SingularB if B cannot be inverted.
[[nodiscard]] StateVec equivalent_control(const DynamicFeedback& fb, const VectorField& slave,
                                          const Reference& reference, double t);

struct DynamicSimOptions {
  /// Fixed RK4 step; 0 selects eps / 20.
  double step = 0.0;
  /// u(0); defaults to the equivalent control u0(0).
  std::optional<StateVec> u_init;
  double tail_fraction = 0.2;
  double switch_window_start = 0.5;
};

struct DynamicRun {
  Trajectory x;
  Trajectory u;
  SyncReport report;
};

/// Fixed-step RK4 on the (x, u) pair. Report scalars: tail_error (sup of
/// |x - y0| over the last 20% of the horizon), max_error, max_reduced_deviation
/// (sup |x - x0|), max_control_deviation (sup over [1, t_end] of |u - u0|),
/// spurious_switches (sign changes of u_i beyond those of u0_i after t = 0.5).
[[nodiscard]] DynamicRun simulate_dynamic(const DynamicFeedback& fb, const VectorField& slave,
                                          const Reference& reference, double t_end,
                                          const DynamicSimOptions& options = {});

/// Same with the perturbed slave phi + p in both equations.
[[nodiscard]] DynamicRun simulate_dynamic_perturbed(const DynamicFeedback& fb, const VectorField& slave,
                                                    const Reference& reference, const Perturbation& p,
                                                    double t_end, const DynamicSimOptions& options = {});

}  // namespace synclab
