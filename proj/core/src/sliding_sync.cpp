#include "synclab/sliding_sync.hpp"

#include "synclab/error.hpp"
#include "synclab/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace synclab {
namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

StateVec slave_rhs(const VectorField& slave, const StaticSimOptions& options, double t, const StateVec& x) {
  StateVec d = slave(t, x);
  if (options.disturbance) d += options.disturbance(t, x);
  return d;
}

}  // namespace

StaticFeedback::StaticFeedback(std::vector<double> gains, SlidingMode mode)
    : gains_(std::move(gains)), mode_(mode) {
  if (gains_.empty()) throw Error(ErrorKind::InvalidArgument, "static feedback needs at least one gain");
  for (double b : gains_) {
    if (!(b < 0.0)) throw Error(ErrorKind::InvalidArgument, "static feedback gains must be negative");
  }
}

double lyapunov_l1(const StateVec& e) { return e.cwiseAbs().sum(); }

StateVec coupled_static_rhs(const StaticFeedback& fb, const VectorField& slave, const Reference& reference,
                            double t, const StateVec& x) {
  StateVec dx = slave(t, x);
  const StateVec y = reference.state(t);
  for (Eigen::Index i = 0; i < dx.size(); ++i) {
    dx[i] += fb.gains()[static_cast<std::size_t>(i)] * sgn(x[i] - y[i]);
  }
  return dx;
}

std::size_t SwitchLog::count(std::size_t component, double t_begin, double t_end) const {
  const auto& ts = times.at(component);
  auto lo = std::lower_bound(ts.begin(), ts.end(), t_begin);
  auto hi = std::lower_bound(ts.begin(), ts.end(), t_end);
  return static_cast<std::size_t>(std::distance(lo, hi));
}

std::vector<double> chattering_rate(const SwitchLog& log, double t_begin, double t_end) {
  if (!(t_end > t_begin)) throw Error(ErrorKind::InvalidArgument, "rate window must have positive length");
  std::vector<double> rates;
  rates.reserve(log.dimension());
  for (std::size_t i = 0; i < log.dimension(); ++i) {
    rates.push_back(static_cast<double>(log.count(i, t_begin, t_end)) / (t_end - t_begin));
  }
  return rates;
}

StaticRun simulate_static(const StaticFeedback& fb, const VectorField& slave, const Reference& reference,
                          const StateVec& x0, double t_end, const StaticSimOptions& options) {
  const auto n = static_cast<Eigen::Index>(slave.dimension());
  if (fb.dimension() != slave.dimension() || static_cast<Eigen::Index>(x0.size()) != n ||
      reference.dimension() != slave.dimension()) {
    throw Error(ErrorKind::InvalidArgument, "dimension mismatch between feedback, slave, reference and x0");
  }
  if (!(options.step > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
  std::optional<Box> domain;
  if (options.box) {
    if (!options.box->contains(x0)) throw Error(ErrorKind::InvalidArgument, "x0 lies outside the declared box");
    domain = options.box->inflated(options.domain_inflation);
  }

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / options.step - 1e-9));
  const double h = t_end / static_cast<double>(steps);
  const auto& gains = fb.gains();

  std::vector<double> times;
  std::vector<StateVec> states;
  times.reserve(steps + 1);
  states.reserve(steps + 1);

  StaticRun run;
  run.switches.times.resize(static_cast<std::size_t>(n));
  run.component_hits.resize(static_cast<std::size_t>(n));

  std::vector<bool> sliding(static_cast<std::size_t>(n), false);
  std::vector<double> frozen(static_cast<std::size_t>(n), 0.0);
  std::vector<double> last_sign(static_cast<std::size_t>(n), 0.0);

  StateVec x = x0;
  double t = 0.0;
  auto record = [&](double tk, const StateVec& xk) {
    const StateVec e = xk - reference.state(tk);
    const double v = lyapunov_l1(e);
    times.push_back(tk);
    states.push_back(xk);
    run.lyapunov.push_back(v);
    if (!run.hitting_time && v <= options.hit_tolerance) run.hitting_time = tk;
    if (!run.contact_time && v <= kContactTolerance) run.contact_time = tk;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      if (!run.component_hits[iu] && std::abs(e[i]) <= options.hit_tolerance) run.component_hits[iu] = tk;
    }
    return e;
  };
  {
    const StateVec e0 = record(t, x);
    for (Eigen::Index i = 0; i < n; ++i) last_sign[static_cast<std::size_t>(i)] = sgn(e0[i]);
  }

  auto sliding_condition = [&](std::size_t i, double tk, const StateVec& xk, const StateVec& yk) {
    const StateVec phi = slave_rhs(slave, options, tk, xk);
    const StateVec psi = reference.derivative(tk, yk);
    const auto ii = static_cast<Eigen::Index>(i);
    return std::pair{std::abs(phi[ii] - psi[ii]) < std::abs(gains[i]), phi[ii] - psi[ii]};
  };

  const bool filippov = fb.mode() == SlidingMode::FilippovSliding;

  for (std::size_t k = 0; k < steps; ++k) {
    const double t_next = k + 1 == steps ? t_end : static_cast<double>(k + 1) * h;
    const double hk = t_next - t;
    StateVec x_next;

    if (!filippov) {
      const VectorField field(
          slave.dimension(),
          [&](double ts, const StateVec& xs) {
            StateVec d = coupled_static_rhs(fb, slave, reference, ts, xs);
            if (options.disturbance) d += options.disturbance(ts, xs);
            return d;
          },
          {}, false, "static-coupled");
      x_next = rk4_step(field, t, x, hk);
    } else {
      const StateVec y = reference.state(t);
      const StateVec e = x - y;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        if (sliding[iu] || e[i] == 0.0) {
          const auto [holds, drift] = sliding_condition(iu, t, x, y);
          if (holds) {
            sliding[iu] = true;
          } else {
            // Leave the surface in the direction the uncontrolled error moves.
            sliding[iu] = false;
            frozen[iu] = sgn(drift);
          }
        } else {
          frozen[iu] = sgn(e[i]);
        }
      }
      const VectorField field(
          slave.dimension(),
          [&](double ts, const StateVec& xs) {
            StateVec d = slave_rhs(slave, options, ts, xs);
            StateVec psi;
            bool have_psi = false;
            for (Eigen::Index i = 0; i < n; ++i) {
              const auto iu = static_cast<std::size_t>(i);
              if (sliding[iu]) {
                if (!have_psi) {
                  psi = reference.derivative(ts);
                  have_psi = true;
                }
                d[i] = psi[i];
              } else {
                d[i] += gains[iu] * frozen[iu];
              }
            }
            return d;
          },
          {}, false, "static-filippov");
      x_next = rk4_step(field, t, x, hk);

      const StateVec y_next = reference.state(t_next);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        if (sliding[iu]) {
          x_next[i] = y_next[i];
          continue;
        }
        const double before = e[i];
        const double after = x_next[i] - y_next[i];
        if (before != 0.0 && before * after <= 0.0) {
          StateVec pinned = x_next;
          pinned[i] = y_next[i];
          if (sliding_condition(iu, t_next, pinned, y_next).first) {
            x_next[i] = y_next[i];
            sliding[iu] = true;
          }
        }
      }
    }

    if (!all_finite(x_next)) {
      throw Error(ErrorKind::NonFiniteState, "non-finite state at t = " + std::to_string(t_next));
    }
    if (domain && !domain->contains(x_next)) {
      throw Error(ErrorKind::DomainExceeded,
                  "trajectory left the inflated initial box at t = " + std::to_string(t_next));
    }

    const StateVec e_prev = x - reference.state(t);
    const StateVec e_next = record(t_next, x_next);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      const double s = sgn(e_next[i]);
      if (s != 0.0 && last_sign[iu] != 0.0 && s != last_sign[iu]) {
        // Linear estimate of the crossing inside the step.
        const double denom = e_prev[i] - e_next[i];
        double frac = denom != 0.0 ? e_prev[i] / denom : 1.0;
        frac = std::clamp(frac, 0.0, 1.0);
        double ts = t + frac * hk;
        auto& log = run.switches.times[iu];
        if (!log.empty() && ts <= log.back()) ts = std::nextafter(log.back(), t_next + 1.0);
        log.push_back(ts);
      }
      if (s != 0.0) last_sign[iu] = s;
    }
    x = x_next;
    t = t_next;
  }

  run.trajectory = Trajectory(std::move(times), std::move(states));

  SyncReport& r = run.report;
  r.kind = "static";
  r.scalars["horizon"] = t_end;
  r.scalars["step"] = h;
  r.scalars["initial_lyapunov"] = run.lyapunov.front();
  r.scalars["final_lyapunov"] = run.lyapunov.back();
  double max_increase = 0.0;
  for (std::size_t k = 1; k < run.lyapunov.size(); ++k) {
    max_increase = std::max(max_increase, run.lyapunov[k] - run.lyapunov[k - 1]);
  }
  r.scalars["max_lyapunov_increase"] = max_increase;
  r.scalars["hit"] = run.hitting_time ? 1.0 : 0.0;
  r.scalars["contact"] = run.contact_time ? 1.0 : 0.0;
  if (run.contact_time) r.scalars["contact_time"] = *run.contact_time;
  if (run.hitting_time) {
    r.scalars["hitting_time"] = *run.hitting_time;
    // Measured from exact surface contact when it happens; otherwise from the
    // V_tol crossing, where the remaining approach counts against the run.
    const double settle = run.contact_time ? *run.contact_time : *run.hitting_time;
    double post = 0.0;
    const auto& ts = run.trajectory.times();
    const auto& xs = run.trajectory.states();
    for (std::size_t k = 0; k < ts.size(); ++k) {
      if (ts[k] < settle) continue;
      post = std::max(post, (xs[k] - reference.state(ts[k])).cwiseAbs().maxCoeff());
    }
    r.scalars["post_hit_max_error"] = post;
  }

  std::vector<double> counts;
  std::vector<double> pre_rates;
  std::vector<double> post_rates;
  std::vector<double> ratios;
  std::vector<double> hits;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    counts.push_back(static_cast<double>(run.switches.times[i].size()));
    const auto& hit = run.component_hits[i];
    hits.push_back(hit ? *hit : -1.0);
    if (!hit || *hit <= 0.0 || *hit >= t_end) {
      pre_rates.push_back(0.0);
      post_rates.push_back(0.0);
      ratios.push_back(0.0);
      min_ratio = 0.0;
      continue;
    }
    const double pre = chattering_rate(run.switches, 0.0, *hit)[i];
    const double post = chattering_rate(run.switches, *hit, t_end + h)[i];
    pre_rates.push_back(pre);
    post_rates.push_back(post);
    // One switch over the pre-hit window is the floor, so a switch-free
    // approach still demands a genuinely high post-hit rate.
    const double ratio = post / std::max(pre, 1.0 / *hit);
    ratios.push_back(ratio);
    min_ratio = std::min(min_ratio, ratio);
  }
  r.series["switch_count"] = counts;
  r.series["component_hit_time"] = hits;
  r.series["switch_rate_pre_hit"] = pre_rates;
  r.series["switch_rate_post_hit"] = post_rates;
  r.series["chatter_ratio"] = ratios;
  r.scalars["min_chatter_ratio"] = std::isfinite(min_ratio) ? min_ratio : 0.0;
  if (run.hitting_time) {
    double post_switches = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
      post_switches += static_cast<double>(run.switches.count(i, *run.hitting_time, t_end + h));
    }
    r.scalars["post_hit_switches"] = post_switches;
  }
  return run;
}

double GainCertificate::hit_bound(const StateVec& x0, const StateVec& y0_at_0) const {
  if (!valid) throw Error(ErrorKind::GainTooSmall, "certificate invalid: mu_I = " + std::to_string(mu) + " >= 0");
  return -lyapunov_l1(x0 - y0_at_0) / mu;
}

GainCertificate certify_gains(const StaticFeedback& fb, const VectorField& slave, const Reference& reference,
                              const Box& box, const CertifyOptions& options) {
  const auto n = static_cast<Eigen::Index>(slave.dimension());
  if (box.lower.size() != n || box.upper.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "box dimension does not match the slave");
  }
  if (!(box.upper.array() >= box.lower.array()).all()) {
    throw Error(ErrorKind::InvalidArgument, "box upper corner below lower corner");
  }
  if (options.samples == 0) throw Error(ErrorKind::InvalidArgument, "certification needs samples");

  const double t0 = reference.begin();
  const double t1 = options.horizon > 0.0 ? std::min(reference.end(), t0 + options.horizon) : reference.end();

  // Hull of I and the sampled range of y0, then inflated.
  Box hull = box;
  constexpr int kRangeSamples = 2000;
  for (int k = 0; k <= kRangeSamples; ++k) {
    const StateVec y = reference.state(t0 + (t1 - t0) * k / kRangeSamples);
    hull.lower = hull.lower.cwiseMin(y);
    hull.upper = hull.upper.cwiseMax(y);
  }
  const Box region = hull.inflated(options.region_inflation);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double sup = 0.0;
  StateVec x(n);
  for (std::size_t s = 0; s < options.samples; ++s) {
    const double t = t0 + (t1 - t0) * unit(rng);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = region.lower[i] + (region.upper[i] - region.lower[i]) * unit(rng);
    }
    const StateVec y = reference.state(t);
    const StateVec diff = slave(t, x) - reference.derivative(t, y);
    sup = std::max(sup, diff.cwiseAbs().maxCoeff());
  }

  GainCertificate cert;
  cert.box = box;
  cert.sample_region = region;
  cert.samples = options.samples;
  cert.m_bound = options.safety_factor * sup + options.extra_bound;
  cert.mu = -std::numeric_limits<double>::infinity();
  for (double b : fb.gains()) cert.mu = std::max(cert.mu, cert.m_bound + b);
  cert.valid = cert.mu < 0.0;
  if (cert.valid) {
    const StateVec y0 = reference.state(t0);
    double v_max = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      v_max += std::max(std::abs(box.lower[i] - y0[i]), std::abs(box.upper[i] - y0[i]));
    }
    cert.t_hit_bound = -v_max / cert.mu;
  } else {
    cert.t_hit_bound = std::numeric_limits<double>::infinity();
  }
  return cert;
}

void require_valid_gains(const GainCertificate& certificate) {
  if (!certificate.valid) {
    throw Error(ErrorKind::GainTooSmall, "mu_I = " + std::to_string(certificate.mu) +
                                             " >= 0: gains must satisfy b_i < -M_I = " +
                                             std::to_string(-certificate.m_bound));
  }
}

}  // namespace synclab
