#include "synclab/limit_cycle.hpp"

#include "synclab/crossing.hpp"
#include "synclab/error.hpp"
#include "synclab/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace synclab {
namespace {

constexpr double kOrbitRtol = 1e-11;
constexpr double kOrbitAtol = 1e-12;
constexpr double kOrbitSampleFraction = 1.0 / 2000.0;

// State layout: [x; vec(Y)] with Y stored column-major.
VectorField variational_field(const VectorField& field) {
  const auto n = static_cast<Eigen::Index>(field.dimension());
  auto eval = [field, n](double t, const StateVec& s) {
    const StateVec x = s.head(n);
    const Matrix y = Eigen::Map<const Matrix>(s.data() + n, n, n);
    StateVec out(n + n * n);
    out.head(n) = field(t, x);
    const Matrix dy = field.jacobian(t, x) * y;
    out.tail(n * n) = Eigen::Map<const StateVec>(dy.data(), n * n);
    return out;
  };
  return VectorField(static_cast<std::size_t>(n + n * n), eval, {}, field.autonomous(),
                     field.name() + "+variational");
}

// State layout: [x; z] with z' = -f'(x)^T z.
VectorField adjoint_field(const VectorField& field) {
  const auto n = static_cast<Eigen::Index>(field.dimension());
  auto eval = [field, n](double t, const StateVec& s) {
    const StateVec x = s.head(n);
    StateVec out(2 * n);
    out.head(n) = field(t, x);
    out.tail(n) = -field.jacobian(t, x).transpose() * s.tail(n);
    return out;
  };
  return VectorField(static_cast<std::size_t>(2 * n), eval, {}, field.autonomous(),
                     field.name() + "+adjoint");
}

struct FlowResult {
  StateVec end;
  Matrix jacobian;
};

FlowResult flow_with_variations(const VectorField& field, const StateVec& x, double duration,
                                double rtol, double atol) {
  const auto n = static_cast<Eigen::Index>(field.dimension());
  StateVec s(n + n * n);
  s.head(n) = x;
  Matrix id = Matrix::Identity(n, n);
  s.tail(n * n) = Eigen::Map<const StateVec>(id.data(), n * n);
  const Trajectory traj = integrate_adaptive(variational_field(field), s, 0.0, duration, rtol, atol, 0.0);
  const StateVec& end = traj.back();
  return {end.head(n), Eigen::Map<const Matrix>(end.data() + n, n, n)};
}

Trajectory sample_orbit(const VectorField& field, const StateVec& x0, double period) {
  AdaptiveOptions opts;
  opts.rtol = kOrbitRtol;
  opts.atol = kOrbitAtol;
  opts.h_max = period * kOrbitSampleFraction;
  return integrate_adaptive(field, x0, 0.0, period, opts);
}

template <typename Fn>
double golden_section_min(Fn&& fn, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

bool Box::contains(const StateVec& x) const {
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Box Box::inflated(double factor) const {
  const StateVec center = 0.5 * (lower + upper);
  const StateVec half = 0.5 * (upper - lower);
  return {center - factor * half, center + factor * half};
}

LimitCycle::LimitCycle(VectorField field, double period, Trajectory orbit)
    : field_(std::move(field)), period_(period), orbit_(std::move(orbit)) {
  if (!(period_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "cycle period must be positive");
  if (orbit_.empty() || orbit_.start_time() != 0.0 || std::abs(orbit_.end_time() - period_) > 1e-12 * period_) {
    throw Error(ErrorKind::InvalidArgument, "cycle orbit must span [0, T]");
  }
}

double LimitCycle::closure() const { return (orbit_.back() - orbit_.front()).cwiseAbs().maxCoeff(); }

double LimitCycle::wrap(double t) const {
  double w = std::fmod(t, period_);
  if (w < 0.0) w += period_;
  if (w >= period_) w = 0.0;
  return w;
}

StateVec LimitCycle::state_at(double t) const { return orbit_.at(wrap(t)); }

StateVec LimitCycle::velocity_at(double t) const { return field_(0.0, state_at(t)); }

LimitCycle LimitCycle::shifted(double phase) const {
  const StateVec start = state_at(phase);
  return LimitCycle(field_, period_, sample_orbit(field_, start, period_));
}

std::pair<LimitCycle, double> LimitCycle::anchored_near(const StateVec& point) const {
  const auto& times = orbit_.times();
  const auto& states = orbit_.states();
  std::size_t best = 0;
  double best_d = (states[0] - point).squaredNorm();
  for (std::size_t k = 1; k < states.size(); ++k) {
    const double d = (states[k] - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  const double lo = best == 0 ? times[0] - (times[1] - times[0]) : times[best - 1];
  const double hi = best + 1 == times.size() ? times.back() + (times[1] - times[0]) : times[best + 1];
  const double phase = wrap(golden_section_min(
      [&](double t) { return (state_at(t) - point).squaredNorm(); }, lo, hi, 1e-12));
  return {shifted(phase), phase};
}

LimitCycle find_limit_cycle(const VectorField& field, const StateVec& seed, double period_guess,
                            const LimitCycleOptions& options) {
  if (!field.autonomous()) throw Error(ErrorKind::InvalidArgument, "limit cycles need an autonomous field");
  if (!(period_guess > 0.0)) throw Error(ErrorKind::InvalidArgument, "period guess must be positive");
  if (static_cast<std::size_t>(seed.size()) != field.dimension()) {
    throw Error(ErrorKind::InvalidArgument, "seed dimension does not match field");
  }
  const auto n = static_cast<Eigen::Index>(field.dimension());

  // Relax onto the attractor.
  AdaptiveOptions relax;
  relax.rtol = 1e-9;
  relax.atol = 1e-11;
  if (options.bounding_box) {
    const Box box = *options.bounding_box;
    relax.observer = [box](double t, const StateVec& x) {
      if (!box.contains(x)) {
        throw Error(ErrorKind::TransientEscape, "trajectory left the bounding box at t = " + std::to_string(t));
      }
    };
  }
  StateVec relaxed;
  try {
    relaxed = integrate_adaptive(field, seed, 0.0, options.burn_in_periods * period_guess, relax).back();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NonFiniteState || e.kind() == ErrorKind::StepUnderflow) {
      throw Error(ErrorKind::TransientEscape, std::string("relaxation failed: ") + e.what());
    }
    throw;
  }

  const StateVec f_relaxed = field(0.0, relaxed);
  if (f_relaxed.norm() < 1e-10) {
    throw Error(ErrorKind::NoConvergence, "relaxed seed is an equilibrium, not a cycle");
  }
  const StateVec normal = f_relaxed.normalized();
  auto section = [&](double, const StateVec& x) { return normal.dot(x - relaxed); };

  // First same-direction return after half the guessed period.
  const Trajectory first = integrate_adaptive(field, relaxed, 0.0, 2.5 * period_guess, options.rtol,
                                              options.atol, period_guess / 200.0);
  double period = -1.0;
  for (const auto& c : detect_crossing(first, section, CrossingDirection::Up)) {
    if (c.time > 0.5 * period_guess) {
      period = c.time;
      break;
    }
  }
  if (period < 0.0) {
    throw Error(ErrorKind::NoConvergence, "no return to the section within 2.5 periods of the guess");
  }

  StateVec x = relaxed;
  bool converged = false;
  for (int iter = 0; iter < options.max_newton_steps; ++iter) {
    const FlowResult flow = flow_with_variations(field, x, period, options.rtol, options.atol);
    const StateVec residual = flow.end - x;
    const double phase = section(0.0, x);

    Matrix system = Matrix::Zero(n + 1, n + 1);
    system.topLeftCorner(n, n) = flow.jacobian - Matrix::Identity(n, n);
    system.topRightCorner(n, 1) = field(0.0, flow.end);
    system.bottomLeftCorner(1, n) = normal.transpose();
    StateVec rhs(n + 1);
    rhs.head(n) = -residual;
    rhs[n] = -phase;

    Eigen::FullPivLU<Matrix> lu(system);
    lu.setThreshold(1e-8);
    if (lu.rank() < n + 1) {
      throw Error(ErrorKind::NoConvergence,
                  "singular shooting system (cycle is not isolated or multiplier 1 is not simple)");
    }
    const StateVec delta = lu.solve(rhs);
    x += delta.head(n);
    period += delta[n];
    if (!(period > 0.0) || !all_finite(x)) {
      throw Error(ErrorKind::NoConvergence, "Newton iteration diverged");
    }
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    if (residual.cwiseAbs().maxCoeff() < 1e-10 * scale && delta.cwiseAbs().maxCoeff() < 1e-10 * scale) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorKind::NoConvergence,
                "shooting did not converge in " + std::to_string(options.max_newton_steps) + " steps");
  }

  AdaptiveOptions sample;
  sample.rtol = kOrbitRtol;
  sample.atol = kOrbitAtol;
  sample.h_max = period * options.max_sample_fraction;
  Trajectory orbit = integrate_adaptive(field, x, 0.0, period, sample);
  LimitCycle cycle(field, period, std::move(orbit));
  if (cycle.closure() > options.closure_tol) {
    throw Error(ErrorKind::NoConvergence, "orbit closure " + std::to_string(cycle.closure()) +
                                              " exceeds tolerance");
  }
  return cycle;
}

std::size_t FloquetData::trivial_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < multipliers.size(); ++i) {
    if (std::abs(multipliers[i] - 1.0) < std::abs(multipliers[best] - 1.0)) best = i;
  }
  return best;
}

FloquetData monodromy(const LimitCycle& cycle, double rtol, double atol) {
  const FlowResult flow = flow_with_variations(cycle.field(), cycle.anchor(), cycle.period(), rtol, atol);
  Eigen::EigenSolver<Matrix> solver(flow.jacobian, false);
  std::vector<std::complex<double>> mult(solver.eigenvalues().data(),
                                         solver.eigenvalues().data() + solver.eigenvalues().size());
  std::stable_sort(mult.begin(), mult.end(),
                   [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  return {flow.jacobian, std::move(mult)};
}

StateVec AdjointCycle::at(double t) const {
  double w = std::fmod(t, period_);
  if (w < 0.0) w += period_;
  return adjoint_.at(std::min(w, adjoint_.end_time()));
}

AdjointCycle adjoint_cycle(const LimitCycle& cycle, double rtol, double atol) {
  const FloquetData floquet = monodromy(cycle, rtol, atol);
  const auto n = static_cast<Eigen::Index>(cycle.field().dimension());

  Eigen::EigenSolver<Matrix> solver(floquet.monodromy.transpose(), true);
  const auto& values = solver.eigenvalues();
  Eigen::Index pick = -1;
  int near_one = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (std::abs(values[i] - 1.0) < 1e-3) {
      ++near_one;
      if (pick < 0 || std::abs(values[i] - 1.0) < std::abs(values[pick] - 1.0)) pick = i;
    }
  }
  if (near_one != 1) {
    throw Error(ErrorKind::DegenerateMultiplier,
                std::to_string(near_one) + " multipliers within 1e-3 of 1; expected exactly one");
  }
  StateVec z0 = solver.eigenvectors().col(pick).real();
  const double norm = z0.dot(cycle.velocity_at(0.0));
  if (std::abs(norm) < 1e-14) {
    throw Error(ErrorKind::DegenerateMultiplier, "adjoint eigenvector orthogonal to the flow");
  }
  z0 /= norm;

  StateVec s(2 * n);
  s.head(n) = cycle.anchor();
  s.tail(n) = z0;
  AdaptiveOptions opts;
  opts.rtol = rtol;
  opts.atol = atol;
  opts.h_max = cycle.period() * kOrbitSampleFraction;
  const Trajectory joint = integrate_adaptive(adjoint_field(cycle.field()), s, 0.0, cycle.period(), opts);

  std::vector<StateVec> zs;
  std::vector<StateVec> dzs;
  zs.reserve(joint.size());
  dzs.reserve(joint.size());
  for (std::size_t k = 0; k < joint.size(); ++k) {
    zs.push_back(joint.states()[k].tail(n));
    dzs.push_back(joint.derivatives()[k].tail(n));
  }
  return AdjointCycle(cycle.period(), Trajectory(joint.times(), std::move(zs), std::move(dzs)));
}

}  // namespace synclab
