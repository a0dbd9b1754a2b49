#include "synclab/singular_sync.hpp"

#include "synclab/error.hpp"
#include "synclab/integrators.hpp"

#include <algorithm>
#include <cmath>

namespace synclab {
namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

DynamicFeedback::DynamicFeedback(Matrix b, SymMatrix c, double epsilon, StateVec xi0)
    : b_(std::move(b)), c_(std::move(c)), epsilon_(epsilon), xi0_(std::move(xi0)) {
  const Eigen::Index n = xi0_.size();
  if (n == 0 || b_.rows() != n || b_.cols() != n || c_.rows() != n) {
    throw Error(ErrorKind::InvalidArgument, "B, C and xi0 must share one dimension");
  }
  if (!(epsilon_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  alpha_ = -c_.max_eigenvalue();
  if (!(alpha_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "C must have all eigenvalues negative");
  const Matrix sym = 0.5 * (b_ + b_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  nu_ = -eig.eigenvalues().maxCoeff();
  if (!(nu_ > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "symmetric part of B must be negative definite");
  }
  // Negative definite symmetric part implies invertibility; the LU check guards rounding.
  Eigen::FullPivLU<Matrix> lu(b_);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularB, "B is not invertible");
  b_inv_ = lu.inverse();
}

DynamicFeedback DynamicFeedback::with_epsilon(double epsilon) const {
  return DynamicFeedback(b_, c_, epsilon, xi0_);
}

SFunction::SFunction(Reference reference, SymMatrix c, const StateVec& xi0)
    : reference_(std::move(reference)), c_(std::move(c)) {
  if (static_cast<std::size_t>(xi0.size()) != reference_.dimension() ||
      c_.rows() != xi0.size()) {
    throw Error(ErrorKind::InvalidArgument, "s-function dimensions disagree");
  }
  offset_ = xi0 - reference_.state(reference_.begin());
}

StateVec SFunction::decaying_offset(double t) const { return sym_expm(c_, t) * offset_; }

StateVec SFunction::eval(double t, const StateVec& x) const {
  return decaying_offset(t) - (x - reference_.state(t));
}

SFunction::Partials SFunction::partials(double t, const StateVec&) const {
  const auto n = c_.rows();
  return {c_.matrix() * decaying_offset(t) + reference_.derivative(t), -Matrix::Identity(n, n)};
}

DynamicRates coupled_dynamic_rhs(const DynamicFeedback& fb, const VectorField& slave, const SFunction& sf,
                                 double t, const StateVec& x, const StateVec& u, const Perturbation& p) {
  StateVec drive = slave(t, x);
  if (p) drive += p(t, x);
  StateVec dx = drive - fb.b() * u;
  const SFunction::Partials d = sf.partials(t, x);
  StateVec g = d.dt + d.dx * dx;
  return {std::move(dx), g / fb.epsilon()};
}

StateVec layer_equilibrium(const DynamicFeedback& fb, const VectorField& slave, const SFunction& sf, double t,
                           const StateVec& x) {
  const StateVec anchor_rate = sf.c().matrix() * sf.decaying_offset(t);
  return -fb.b_inverse() * (anchor_rate + sf.reference().derivative(t) - slave(t, x));
}

StateVec reduced_solution(const DynamicFeedback& fb, const Reference& reference, double t) {
  const StateVec offset = fb.xi0() - reference.state(reference.begin());
  return reference.state(t) + sym_expm(fb.c(), t) * offset;
}

StateVec equivalent_control(const DynamicFeedback& fb, const VectorField& slave, const Reference& reference,
                            double t) {
  const SFunction sf(reference, fb.c(), fb.xi0());
  return layer_equilibrium(fb, slave, sf, t, reduced_solution(fb, reference, t));
}

namespace {

DynamicRun run_dynamic(const DynamicFeedback& fb, const VectorField& slave, const Reference& reference,
                       const Perturbation& p, double t_end, const DynamicSimOptions& options) {
  const auto n = static_cast<Eigen::Index>(fb.dimension());
  if (slave.dimension() != fb.dimension() || reference.dimension() != fb.dimension()) {
    throw Error(ErrorKind::InvalidArgument, "dynamic feedback dimension mismatch");
  }
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
  const double h_req = options.step > 0.0 ? options.step : fb.epsilon() / 20.0;
  const SFunction sf(reference, fb.c(), fb.xi0());

  StateVec z0(2 * n);
  z0.head(n) = fb.xi0();
  if (options.u_init) {
    if (options.u_init->size() != n) throw Error(ErrorKind::InvalidArgument, "u(0) has wrong dimension");
    z0.tail(n) = *options.u_init;
  } else {
    z0.tail(n) = equivalent_control(fb, slave, reference, 0.0);
  }

  const VectorField pair(
      static_cast<std::size_t>(2 * n),
      [&](double t, const StateVec& z) {
        const DynamicRates r = coupled_dynamic_rhs(fb, slave, sf, t, z.head(n), z.tail(n), p);
        StateVec out(2 * n);
        out.head(n) = r.dx;
        out.tail(n) = r.du;
        return out;
      },
      {}, false, "dynamic-coupled");
  const Trajectory joint = integrate_fixed(pair, z0, 0.0, t_end, h_req);

  std::vector<StateVec> xs, dxs, us, dus;
  xs.reserve(joint.size());
  dxs.reserve(joint.size());
  us.reserve(joint.size());
  dus.reserve(joint.size());
  for (std::size_t k = 0; k < joint.size(); ++k) {
    xs.push_back(joint.states()[k].head(n));
    us.push_back(joint.states()[k].tail(n));
    dxs.push_back(joint.derivatives()[k].head(n));
    dus.push_back(joint.derivatives()[k].tail(n));
  }

  SyncReport r;
  r.kind = "dynamic";
  const auto& ts = joint.times();
  const double tail_start = t_end * (1.0 - options.tail_fraction);
  double tail = 0.0, max_err = 0.0, max_reduced = 0.0, max_ctrl = 0.0;
  std::vector<double> tv(static_cast<std::size_t>(n), 0.0);
  std::vector<double> switches(static_cast<std::size_t>(n), 0.0);
  std::vector<double> reference_switches(static_cast<std::size_t>(n), 0.0);
  std::vector<double> last_u(static_cast<std::size_t>(n), 0.0);
  std::vector<double> last_u0(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    const StateVec y = reference.state(t);
    const double err = (xs[k] - y).norm();
    max_err = std::max(max_err, err);
    if (t >= tail_start) tail = std::max(tail, err);
    max_reduced = std::max(max_reduced, (xs[k] - reduced_solution(fb, reference, t)).norm());
    const StateVec u0 = equivalent_control(fb, slave, reference, t);
    if (t >= 1.0) max_ctrl = std::max(max_ctrl, (us[k] - u0).norm());
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      if (k > 0) tv[iu] += std::abs(us[k][i] - us[k - 1][i]);
      const double s = sgn(us[k][i]);
      const double s0 = sgn(u0[i]);
      if (t > options.switch_window_start) {
        if (s != 0.0 && last_u[iu] != 0.0 && s != last_u[iu]) switches[iu] += 1.0;
        if (s0 != 0.0 && last_u0[iu] != 0.0 && s0 != last_u0[iu]) reference_switches[iu] += 1.0;
      }
      if (s != 0.0) last_u[iu] = s;
      if (s0 != 0.0) last_u0[iu] = s0;
    }
  }
  double spurious = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    spurious += std::abs(switches[iu] - reference_switches[iu]);
  }
  r.scalars["horizon"] = t_end;
  r.scalars["epsilon"] = fb.epsilon();
  r.scalars["step"] = t_end / static_cast<double>(ts.size() - 1);
  r.scalars["alpha"] = fb.alpha();
  r.scalars["nu"] = fb.nu();
  r.scalars["tail_error"] = tail;
  r.scalars["max_error"] = max_err;
  r.scalars["max_reduced_deviation"] = max_reduced;
  r.scalars["max_control_deviation"] = max_ctrl;
  r.scalars["spurious_switches"] = spurious;
  r.series["control_total_variation"] = tv;
  r.series["control_sign_switches"] = switches;
  r.series["equivalent_control_sign_switches"] = reference_switches;

  DynamicRun run{Trajectory(ts, std::move(xs), std::move(dxs)), Trajectory(ts, std::move(us), std::move(dus)),
                 std::move(r)};
  return run;
}

}  // namespace

DynamicRun simulate_dynamic(const DynamicFeedback& fb, const VectorField& slave, const Reference& reference,
                            double t_end, const DynamicSimOptions& options) {
  return run_dynamic(fb, slave, reference, {}, t_end, options);
}

DynamicRun simulate_dynamic_perturbed(const DynamicFeedback& fb, const VectorField& slave,
                                      const Reference& reference, const Perturbation& p, double t_end,
                                      const DynamicSimOptions& options) {
  return run_dynamic(fb, slave, reference, p, t_end, options);
}

}  // namespace synclab
