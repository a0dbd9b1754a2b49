#include "synclab/integrators.hpp"

#include "synclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace synclab {
namespace {

constexpr double kMinStep = 1e-14;

void check_finite(const StateVec& x, double t) {
  if (!all_finite(x)) {
    throw Error(ErrorKind::NonFiniteState, "non-finite state at t = " + std::to_string(t));
  }
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
// b - b_hat (error weights); the 7th stage is FSAL.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

double initial_step(const VectorField& f, double t0, const StateVec& x0, const StateVec& f0,
                    double rtol, double atol, double span) {
  const StateVec scale = (atol + rtol * x0.array().abs()).matrix();
  const double d0 = (x0.array() / scale.array()).abs().maxCoeff();
  const double d1 = (f0.array() / scale.array()).abs().maxCoeff();
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  const StateVec x1 = x0 + h0 * f0;
  const StateVec f1 = f(t0 + h0, x1);
  const double d2 = ((f1 - f0).array() / scale.array()).abs().maxCoeff() / h0;
  const double dmax = std::max(d1, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

StateVec rk4_step(const VectorField& field, double t, const StateVec& x, double h) {
  const StateVec k1 = field(t, x);
  const StateVec k2 = field(t + 0.5 * h, x + (0.5 * h) * k1);
  const StateVec k3 = field(t + 0.5 * h, x + (0.5 * h) * k2);
  const StateVec k4 = field(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate_fixed(const VectorField& field, const StateVec& x0, double t0, double t1,
                           double h, const StepObserver& observer) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
  if (!(t1 > t0)) throw Error(ErrorKind::InvalidArgument, "integration interval must have t1 > t0");
  if (static_cast<std::size_t>(x0.size()) != field.dimension()) {
    throw Error(ErrorKind::InvalidArgument, "initial state dimension does not match field");
  }
  check_finite(x0, t0);
  const auto steps = static_cast<std::size_t>(std::ceil((t1 - t0) / h - 1e-9));
  const double step = (t1 - t0) / static_cast<double>(steps);

  std::vector<double> times;
  std::vector<StateVec> states;
  std::vector<StateVec> derivs;
  times.reserve(steps + 1);
  states.reserve(steps + 1);
  derivs.reserve(steps + 1);

  StepStats stats;
  StateVec x = x0;
  times.push_back(t0);
  states.push_back(x);
  derivs.push_back(field(t0, x));
  ++stats.evaluations;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * step;
    // Reuse the stored derivative as the first stage.
    const StateVec& k1 = derivs.back();
    const StateVec k2 = field(t + 0.5 * step, x + (0.5 * step) * k1);
    const StateVec k3 = field(t + 0.5 * step, x + (0.5 * step) * k2);
    const StateVec k4 = field(t + step, x + step * k3);
    x = x + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t_next = k + 1 == steps ? t1 : t0 + static_cast<double>(k + 1) * step;
    check_finite(x, t_next);
    times.push_back(t_next);
    states.push_back(x);
    derivs.push_back(field(t_next, x));
    stats.evaluations += 4;
    ++stats.accepted;
    if (observer) observer(t_next, x);
  }
  Trajectory traj(std::move(times), std::move(states), std::move(derivs));
  traj.set_stats(stats);
  return traj;
}

Trajectory integrate_adaptive(const VectorField& field, const StateVec& x0, double t0, double t1,
                              const AdaptiveOptions& options) {
  if (!(options.rtol > 0.0) || !(options.atol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "rtol and atol must be positive");
  }
  if (!(t1 > t0)) throw Error(ErrorKind::InvalidArgument, "integration interval must have t1 > t0");
  if (static_cast<std::size_t>(x0.size()) != field.dimension()) {
    throw Error(ErrorKind::InvalidArgument, "initial state dimension does not match field");
  }
  check_finite(x0, t0);
  const double span = t1 - t0;
  const double h_max = options.h_max > 0.0 ? std::min(options.h_max, span) : span;

  StepStats stats;
  std::vector<double> times{t0};
  std::vector<StateVec> states{x0};
  StateVec k1 = field(t0, x0);
  ++stats.evaluations;
  std::vector<StateVec> derivs{k1};

  double h = options.h_init > 0.0
                 ? options.h_init
                 : initial_step(field, t0, x0, k1, options.rtol, options.atol, span);
  h = std::min(h, h_max);
  double t = t0;
  StateVec x = x0;
  bool last_rejected = false;

  while (t < t1) {
    if (stats.accepted + stats.rejected >= options.max_steps) {
      throw Error(ErrorKind::StepUnderflow, "step budget exhausted at t = " + std::to_string(t));
    }
    bool final_step = false;
    if (t + h >= t1 || t1 - (t + h) < 1e-12 * std::max(1.0, std::abs(t1))) {
      h = t1 - t;
      final_step = true;
    }
    if (h < kMinStep) {
      throw Error(ErrorKind::StepUnderflow, "required step below 1e-14 at t = " + std::to_string(t));
    }
    const StateVec k2 = field(t + c2 * h, x + h * (a21 * k1));
    const StateVec k3 = field(t + c3 * h, x + h * (a31 * k1 + a32 * k2));
    const StateVec k4 = field(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const StateVec k5 = field(t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const StateVec k6 =
        field(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const StateVec x_new = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double t_new = final_step ? t1 : t + h;
    const StateVec k7 = field(t_new, x_new);
    stats.evaluations += 6;

    const StateVec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err_norm = 0.0;
    bool finite = all_finite(x_new) && all_finite(k7);
    if (finite) {
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double sc = options.atol + options.rtol * std::max(std::abs(x[i]), std::abs(x_new[i]));
        err_norm = std::max(err_norm, std::abs(err[i]) / sc);
      }
      finite = std::isfinite(err_norm);
    }
    if (!finite) {
      // Treat as a rejection; a NaN that persists down to the minimum step is a blow-up.
      ++stats.rejected;
      if (h * 0.2 < kMinStep) check_finite(x_new, t_new);
      h *= 0.2;
      last_rejected = true;
      continue;
    }

    if (err_norm <= 1.0) {
      t = t_new;
      x = x_new;
      k1 = k7;
      times.push_back(t);
      states.push_back(x);
      derivs.push_back(k1);
      ++stats.accepted;
      if (options.observer) options.observer(t, x);
      double factor = err_norm == 0.0 ? 5.0 : 0.9 * std::pow(err_norm, -0.2);
      factor = std::clamp(factor, 0.2, last_rejected ? 1.0 : 5.0);
      h = std::min(h * factor, h_max);
      last_rejected = false;
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
      last_rejected = true;
    }
  }
  Trajectory traj(std::move(times), std::move(states), std::move(derivs));
  traj.set_stats(stats);
  return traj;
}

Trajectory integrate_adaptive(const VectorField& field, const StateVec& x0, double t0, double t1,
                              double rtol, double atol, double h_max) {
  AdaptiveOptions options;
  options.rtol = rtol;
  options.atol = atol;
  options.h_max = h_max;
  return integrate_adaptive(field, x0, t0, t1, options);
}

}  // namespace synclab
