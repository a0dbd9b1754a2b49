#include "synclab/phase_sync.hpp"

#include "synclab/error.hpp"
#include "synclab/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace synclab {
namespace {

constexpr std::size_t kThetaGrid = 512;
constexpr std::size_t kLagSamples = 1024;
constexpr std::size_t kLagShifts = 512;

void check_periods(const LimitCycle& slave, const LimitCycle& master) {
  const double rel = std::abs(slave.period() - master.period()) / master.period();
  if (rel > 1e-6) {
    throw Error(ErrorKind::PeriodMismatch, "slave period " + std::to_string(slave.period()) +
                                               " and master period " + std::to_string(master.period()) +
                                               " differ by more than 1e-6 relative");
  }
}

// Master samples on a uniform grid reused across many shifts.
std::vector<StateVec> master_samples(const LimitCycle& master, std::size_t n) {
  std::vector<StateVec> out;
  out.reserve(n);
  const double dt = master.period() / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(master.state_at(static_cast<double>(k) * dt));
  return out;
}

double distance_with(const LimitCycle& slave, const std::vector<StateVec>& ys, double period, double shift) {
  const std::size_t n = ys.size();
  const double dt = period / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += (slave.state_at(static_cast<double>(k) * dt + shift) - ys[k]).squaredNorm();
  }
  return sum * dt;
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

double wrap_phase(double theta, double period) {
  double w = std::fmod(theta, period);
  if (w < 0.0) w += period;
  if (w >= period) w -= period;
  return w;
}

}  // namespace

double distance_integral(const LimitCycle& slave, const LimitCycle& master, double shift,
                         std::size_t samples) {
  check_periods(slave, master);
  if (samples < 2) throw Error(ErrorKind::InvalidArgument, "need at least two quadrature samples");
  return distance_with(slave, master_samples(master, samples), master.period(), shift);
}

ThetaStar theta_star(const LimitCycle& slave, const LimitCycle& master) {
  check_periods(slave, master);
  const double period = master.period();
  const auto ys = master_samples(master, kDistanceSamples);
  auto dist = [&](double s) { return distance_with(slave, ys, period, s); };

  std::vector<double> values(kThetaGrid);
  const double step = period / static_cast<double>(kThetaGrid);
  for (std::size_t k = 0; k < kThetaGrid; ++k) values[k] = dist(static_cast<double>(k) * step);

  const auto global = static_cast<std::size_t>(
      std::distance(values.begin(), std::min_element(values.begin(), values.end())));
  for (std::size_t k = 0; k < kThetaGrid; ++k) {
    const std::size_t gap = std::min((k + kThetaGrid - global) % kThetaGrid, (global + kThetaGrid - k) % kThetaGrid);
    if (gap < 2) continue;
    const double prev = values[(k + kThetaGrid - 1) % kThetaGrid];
    const double next = values[(k + 1) % kThetaGrid];
    const bool local_min = values[k] <= prev && values[k] <= next;
    if (local_min && values[k] - values[global] <= 1e-6) {
      throw Error(ErrorKind::NonUniqueMin,
                  "distance functional has competing minima at theta = " +
                      std::to_string(static_cast<double>(global) * step) + " and " +
                      std::to_string(static_cast<double>(k) * step));
    }
  }

  const double centre = static_cast<double>(global) * step;
  const double theta = golden_section_min(dist, centre - step, centre + step, 1e-8);
  ThetaStar out;
  out.theta0 = wrap_phase(theta, period);
  out.dmin = dist(theta);
  // The refinement never does worse than the grid.
  if (values[global] < out.dmin) {
    out.theta0 = centre;
    out.dmin = values[global];
  }
  return out;
}

double MalkinProfile::phase_distance(double a, double b) const {
  const double d = wrap_phase(a - b, period);
  return std::min(d, period - d);
}

std::optional<MalkinRoot> MalkinProfile::increasing_root() const {
  std::optional<MalkinRoot> best;
  for (const auto& r : roots) {
    if (r.slope <= 0.0) continue;
    if (!best || phase_distance(r.theta, theta0) < phase_distance(best->theta, theta0)) best = r;
  }
  return best;
}

MalkinProfile malkin_F(const LimitCycle& slave, const LimitCycle& master, double delta, std::size_t grid) {
  if (delta < 0.0) throw Error(ErrorKind::InvalidArgument, "delta must be non-negative");
  if (grid < 4) throw Error(ErrorKind::InvalidArgument, "Malkin grid too coarse");
  const ThetaStar star = theta_star(slave, master);
  const double period = master.period();
  const auto ys = master_samples(master, kDistanceSamples);
  auto f = [&](double theta) { return distance_with(slave, ys, period, theta) - star.dmin - period * delta; };

  MalkinProfile p;
  p.period = period;
  p.delta = delta;
  p.theta0 = star.theta0;
  p.dmin = star.dmin;
  p.theta.resize(grid + 1);
  p.values.resize(grid + 1);
  const double step = period / static_cast<double>(grid);
  for (std::size_t k = 0; k <= grid; ++k) {
    p.theta[k] = k == grid ? period : static_cast<double>(k) * step;
    p.values[k] = f(p.theta[k]);
  }

  const double h = 1e-5 * period;
  for (std::size_t k = 0; k < grid; ++k) {
    const double a = p.values[k];
    const double b = p.values[k + 1];
    if (!((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0))) continue;
    double lo = p.theta[k];
    double hi = p.theta[k + 1];
    double f_lo = a;
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      const double f_mid = f(mid);
      if ((f_mid < 0.0) == (f_lo < 0.0) && f_mid != 0.0) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
    }
    const double root = 0.5 * (lo + hi);
    const double slope = (f(root + h) - f(root - h)) / (2.0 * h);
    p.roots.push_back({wrap_phase(root, period), slope});
  }
  return p;
}

PhaseCoupling::PhaseCoupling(LimitCycle slave, LimitCycle master, double epsilon, double delta)
    : slave_(std::move(slave)), master_(std::move(master)), epsilon_(epsilon), delta_(delta) {
  if (!(epsilon_ >= 0.0)) throw Error(ErrorKind::InvalidArgument, "coupling strength must be >= 0");
  if (!(delta_ >= 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be >= 0");
  if (slave_.field().dimension() != master_.field().dimension()) {
    throw Error(ErrorKind::InvalidArgument, "slave and master dimensions differ");
  }
  const ThetaStar star = theta_star(slave_, master_);
  dmin_ = star.dmin;
  theta0_ = star.theta0;
}

PhaseCoupling PhaseCoupling::with_epsilon(double epsilon) const {
  PhaseCoupling copy = *this;
  if (!(epsilon >= 0.0)) throw Error(ErrorKind::InvalidArgument, "coupling strength must be >= 0");
  copy.epsilon_ = epsilon;
  return copy;
}

StateVec coupled_phase_rhs(const PhaseCoupling& coupling, double t, const StateVec& x) {
  const StateVec fx = coupling.slave().field()(t, x);
  const double mismatch = (x - coupling.master().state_at(t)).squaredNorm();
  // (peq) carries the minimum of the time-averaged distance, hence D_min / T.
  const double gain = 1.0 + coupling.epsilon() * (mismatch - coupling.dmin() / coupling.period() - coupling.delta());
  return gain * fx;
}

VectorField coupled_phase_field(const PhaseCoupling& coupling) {
  return VectorField(
      coupling.slave().field().dimension(),
      [coupling](double t, const StateVec& x) { return coupled_phase_rhs(coupling, t, x); }, {}, false,
      "phase-coupled " + coupling.slave().field().name());
}

double phase_lag(const Trajectory& x, const LimitCycle& master, double t_begin) {
  const double period = master.period();
  const std::size_t n = kLagSamples;
  const std::size_t stride = n / kLagShifts;
  const double dt = period / static_cast<double>(n);

  std::vector<StateVec> xs;
  xs.reserve(n);
  for (std::size_t j = 0; j < n; ++j) xs.push_back(x.at(t_begin + static_cast<double>(j) * dt));
  // y0 on the grid aligned with t_begin, so that a shift of i*stride samples is a pure index offset.
  std::vector<StateVec> ys;
  ys.reserve(n);
  for (std::size_t j = 0; j < n; ++j) ys.push_back(master.state_at(t_begin + static_cast<double>(j) * dt));

  // Shifts s_i = (i - kLagShifts/2) * stride * dt cover [-T/2, T/2).
  std::vector<double> cost(kLagShifts);
  for (std::size_t i = 0; i < kLagShifts; ++i) {
    const std::size_t offset = (i * stride + n - n / 2) % n;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += (xs[j] - ys[(j + offset) % n]).squaredNorm();
    cost[i] = sum * dt;
  }
  const auto best = static_cast<std::size_t>(
      std::distance(cost.begin(), std::min_element(cost.begin(), cost.end())));
  const double c0 = cost[(best + kLagShifts - 1) % kLagShifts];
  const double c1 = cost[best];
  const double c2 = cost[(best + 1) % kLagShifts];
  const double denom = c0 - 2.0 * c1 + c2;
  double frac = denom > 0.0 ? 0.5 * (c0 - c2) / denom : 0.0;
  frac = std::clamp(frac, -0.5, 0.5);
  const double shift_step = static_cast<double>(stride) * dt;
  double lag = (static_cast<double>(best) - static_cast<double>(kLagShifts / 2) + frac) * shift_step;
  if (lag >= 0.5 * period) lag -= period;
  if (lag < -0.5 * period) lag += period;
  return lag;
}

PhaseSyncRun simulate_phase_sync(const PhaseCoupling& coupling, const StateVec& x_init, int n_periods,
                                 const PhaseSyncOptions& options) {
  if (n_periods < 1) throw Error(ErrorKind::InvalidArgument, "need at least one period");
  const double period = coupling.period();
  AdaptiveOptions opts;
  opts.rtol = options.rtol;
  opts.atol = options.atol;
  opts.h_max = period * options.max_step_fraction;
  Trajectory traj =
      integrate_adaptive(coupled_phase_field(coupling), x_init, 0.0, static_cast<double>(n_periods) * period, opts);

  PhaseSyncRun run{std::move(traj), {}, {}};
  run.lags.reserve(static_cast<std::size_t>(n_periods));
  for (int k = 0; k < n_periods; ++k) {
    run.lags.push_back(phase_lag(run.trajectory, coupling.master(), static_cast<double>(k) * period));
  }

  // Final-period L2 distance against y0, trapezoid on a uniform grid.
  const double t_last = static_cast<double>(n_periods - 1) * period;
  const double dt = period / static_cast<double>(kDistanceSamples);
  double integral = 0.0;
  for (std::size_t j = 0; j < kDistanceSamples; ++j) {
    const double t = t_last + static_cast<double>(j) * dt;
    integral += (run.trajectory.at(t) - coupling.master().state_at(t)).squaredNorm();
  }
  integral *= dt;

  SyncReport& r = run.report;
  r.kind = "phase";
  r.scalars["period"] = period;
  r.scalars["epsilon"] = coupling.epsilon();
  r.scalars["delta"] = coupling.delta();
  r.scalars["dmin"] = coupling.dmin();
  r.scalars["final_period_distance"] = integral;
  r.scalars["prop_residual"] = std::abs(integral - coupling.dmin());
  r.scalars["n_periods"] = n_periods;
  const double first = run.lags.size() > 1 ? run.lags[1] : run.lags[0];
  const double last = run.lags.back();
  r.scalars["lag_early"] = std::abs(first);
  r.scalars["lag_final"] = std::abs(last);
  r.scalars["lag_final_fraction"] = std::abs(last) / period;
  r.scalars["lag_ratio"] = std::abs(first) > 0.0 ? std::abs(last) / std::abs(first) : 0.0;
  r.scalars["lag_relative_change"] =
      std::abs(first) > 0.0 ? std::abs(std::abs(last) - std::abs(first)) / std::abs(first) : 0.0;
  r.series["phase_lag"] = run.lags;
  return run;
}

}  // namespace synclab
