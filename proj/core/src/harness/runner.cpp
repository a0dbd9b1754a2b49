#include "synclab/harness/runner.hpp"

#include "synclab/error.hpp"
#include "synclab/harness/report.hpp"
#include "synclab/integrators.hpp"
#include "synclab/limit_cycle.hpp"
#include "synclab/models.hpp"
#include "synclab/phase_sync.hpp"
#include "synclab/singular_sync.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace synclab::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kPanelSamples = 600;

StateVec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const StateVec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<std::string> trace_header(std::size_t n, bool with_u) {
  std::vector<std::string> h{"t"};
  for (const char* prefix : {"x_", "y0_", "e_"}) {
    for (std::size_t i = 1; i <= n; ++i) h.push_back(prefix + std::to_string(i));
  }
  if (with_u) {
    for (std::size_t i = 1; i <= n; ++i) h.push_back("u_" + std::to_string(i));
  }
  return h;
}

void push_row(Table& table, double t, const StateVec& x, const StateVec& y, const StateVec* u = nullptr) {
  std::vector<double> row;
  row.reserve(table.header.size());
  row.push_back(t);
  for (Eigen::Index i = 0; i < x.size(); ++i) row.push_back(x[i]);
  for (Eigen::Index i = 0; i < y.size(); ++i) row.push_back(y[i]);
  for (Eigen::Index i = 0; i < x.size(); ++i) row.push_back(x[i] - y[i]);
  if (u) {
    for (Eigen::Index i = 0; i < u->size(); ++i) row.push_back((*u)[i]);
  }
  table.rows.push_back(std::move(row));
}

template <typename F>
Series sample(std::string label, double a, double b, F&& value, LineStyle style) {
  Series s{std::move(label), {}, {}, style};
  for (std::size_t k = 0; k <= kPanelSamples; ++k) {
    const double t = a + (b - a) * static_cast<double>(k) / kPanelSamples;
    s.x.push_back(t);
    s.y.push_back(value(t));
  }
  return s;
}

/// x1 (solid) against y0_1 (dotted) straight from the trace rows in [a, b].
Panel trace_panel(const Table& trace, std::string title, double a, double b) {
  Panel p{std::move(title), "t", "x1", {}};
  Series x{"x1 (slave)", {}, {}, LineStyle::Solid};
  Series y{"y0,1 = cos t (master)", {}, {}, LineStyle::Dotted};
  const std::size_t cx = trace.column("x_1");
  const std::size_t cy = trace.column("y0_1");
  for (const auto& row : trace.rows) {
    if (row[0] < a || row[0] > b) continue;
    x.x.push_back(row[0]);
    x.y.push_back(row[cx]);
    y.x.push_back(row[0]);
    y.y.push_back(row[cy]);
  }
  p.series = {std::move(x), std::move(y)};
  return p;
}

void apply_thresholds(SyncReport& report, const std::vector<ThresholdSpec>& thresholds) {
  for (const auto& t : thresholds) report.check(t.name, t.metric, t.comparison, t.value);
}

VectorField::EvalFn sine_forcing(const Forcing& f, std::size_t n) {
  if (!f.active()) return {};
  const double a = f.amplitude;
  const double w = f.frequency;
  return [a, w, n](double t, const StateVec&) {
    return StateVec(StateVec::Constant(static_cast<Eigen::Index>(n), a * std::sin(w * t)));
  };
}

// ---------------------------------------------------------------- phase

ScenarioResult execute_phase(const Scenario& sc) {
  const PhaseParams& p = sc.phase();
  const VectorField slave_field = models::make(p.model);
  LimitCycle master = find_limit_cycle(models::make(p.master_model),
                                       p.master_model == p.model ? to_vec(p.cycle_seed)
                                                                 : to_vec(models::info(p.master_model).default_seed),
                                       p.master_model == p.model ? p.period_guess
                                                                 : models::info(p.master_model).period_guess);
  if (p.anchor) master = master.anchored_near(to_vec(*p.anchor)).first;
  LimitCycle slave = p.master_model == p.model ? master
                                               : find_limit_cycle(slave_field, to_vec(p.cycle_seed), p.period_guess);

  const PhaseCoupling coupling(slave, master, p.epsilon, p.delta);
  PhaseSyncOptions opts;
  opts.rtol = p.rtol;
  opts.atol = p.atol;
  const PhaseSyncRun run = simulate_phase_sync(coupling, to_vec(p.x0), p.periods, opts);

  ScenarioResult out;
  out.report = run.report;
  SyncReport& r = out.report;
  r.scalars["theta0"] = coupling.theta0();
  r.scalars["closure"] = master.closure();
  const MalkinProfile profile = malkin_F(slave, master, p.delta);
  r.scalars["malkin_roots"] = static_cast<double>(profile.roots.size());
  if (auto root = profile.increasing_root()) {
    r.scalars["malkin_root"] = root->theta;
    r.scalars["malkin_root_slope"] = root->slope;
  }
  // Root of F_delta nearest to the settled lag, and the sign of F' there.
  if (!profile.roots.empty()) {
    const double settled = run.lags.back();
    const MalkinRoot* nearest = &profile.roots.front();
    for (const auto& root : profile.roots) {
      if (profile.phase_distance(settled, root.theta) < profile.phase_distance(settled, nearest->theta)) nearest = &root;
    }
    r.scalars["lag_root_mismatch"] = profile.phase_distance(settled, nearest->theta);
    r.scalars["settled_root"] = nearest->theta;
    r.scalars["settled_root_slope"] = nearest->slope;
  }
  if (p.control_run) {
    const PhaseSyncRun control = simulate_phase_sync(coupling.with_epsilon(0.0), to_vec(p.x0), p.periods, opts);
    r.scalars["control_lag_early"] = *control.report.scalar("lag_early");
    r.scalars["control_lag_final"] = *control.report.scalar("lag_final");
    r.scalars["control_lag_relative_change"] = *control.report.scalar("lag_relative_change");
    r.series["control_phase_lag"] = control.lags;
  }

  const std::size_t n = slave_field.dimension();
  out.trace.header = trace_header(n, false);
  const auto& ts = run.trajectory.times();
  const auto& xs = run.trajectory.states();
  for (std::size_t k = 0; k < ts.size(); k += sc.trace_stride) push_row(out.trace, ts[k], xs[k], master.state_at(ts[k]));

  if (sc.plots) {
    const double T = master.period();
    const double last = static_cast<double>(p.periods);
    auto panel = [&](double a, double b, const std::string& title) {
      Panel pn{title, "t", "x1", {}};
      pn.series.push_back(sample("x1 (slave)", a, b, [&](double t) { return run.trajectory.at(t)[0]; }, LineStyle::Solid));
      pn.series.push_back(sample("y0,1 (master)", a, b, [&](double t) { return master.state_at(t)[0]; }, LineStyle::Dashed));
      return pn;
    };
    Figure fig{sc.name + ": x1(t) and y0,1(t)", {}};
    fig.panels.push_back(panel(T, 2 * T, "t in [T, 2T]"));
    fig.panels.push_back(panel((last - 1) * T, last * T,
                               "t in [" + std::to_string(p.periods - 1) + "T, " + std::to_string(p.periods) + "T]"));
    out.figures.emplace_back("x1.svg", std::move(fig));

    Figure lag{sc.name + ": phase lag per period", {}};
    Panel lp{"lag over [kT, (k+1)T]", "period k", "lag", {}};
    Series s{"coupled", {}, {}, LineStyle::Solid};
    for (std::size_t k = 0; k < run.lags.size(); ++k) {
      s.x.push_back(static_cast<double>(k));
      s.y.push_back(run.lags[k]);
    }
    lp.series.push_back(std::move(s));
    if (auto it = r.series.find("control_phase_lag"); it != r.series.end()) {
      Series c{"eps = 0", {}, {}, LineStyle::Dashed};
      for (std::size_t k = 0; k < it->second.size(); ++k) {
        c.x.push_back(static_cast<double>(k));
        c.y.push_back(it->second[k]);
      }
      lp.series.push_back(std::move(c));
    }
    lag.panels.push_back(std::move(lp));
    out.figures.emplace_back("phase_lag.svg", std::move(lag));
  }
  return out;
}

// ---------------------------------------------------------------- static

CertifyOptions certify_options(const Scenario& sc) {
  const StaticParams& p = sc.static_params();
  CertifyOptions o;
  o.samples = p.certify_samples;
  o.seed = sc.seed;
  o.horizon = p.certify_horizon > 0.0 ? p.certify_horizon : p.t_end;
  o.region_inflation = p.certify_inflation;
  o.safety_factor = p.certify_safety;
  o.extra_bound = std::abs(p.disturbance.amplitude);
  return o;
}

StaticSimOptions static_options(const StaticParams& p, std::size_t n) {
  StaticSimOptions o;
  o.step = p.step;
  o.hit_tolerance = p.hit_tolerance;
  o.box = p.box;
  o.disturbance = sine_forcing(p.disturbance, n);
  return o;
}

ScenarioResult execute_static(const Scenario& sc) {
  const StaticParams& p = sc.static_params();
  const VectorField slave = models::make(p.slave);
  const std::size_t n = slave.dimension();
  const Reference reference = make_reference(p.master, p.t_end);
  const StaticFeedback fb(p.gains, p.mode);
  const StaticSimOptions opts = static_options(p, n);
  const StaticRun run = simulate_static(fb, slave, reference, to_vec(p.x0), p.t_end, opts);

  ScenarioResult out;
  out.report = run.report;
  SyncReport& r = out.report;
  r.scalars["mode_filippov"] = p.mode == SlidingMode::FilippovSliding ? 1.0 : 0.0;

  if (p.box) {
    const GainCertificate cert = certify_gains(fb, slave, reference, *p.box, certify_options(sc));
    r.scalars["m_bound"] = cert.m_bound;
    r.scalars["mu"] = cert.mu;
    r.scalars["certificate_valid"] = cert.valid ? 1.0 : 0.0;
    r.scalars["t_hit_bound"] = cert.t_hit_bound;
    // -V(e(0)) / mu_I; negative (no guarantee at all) when the gains are too small.
    const double bound = -lyapunov_l1(to_vec(p.x0) - reference.state(0.0)) / cert.mu;
    r.scalars["hit_bound"] = bound;
    r.scalars["hit_within_bound"] = cert.valid && run.hitting_time && *run.hitting_time <= bound ? 1.0 : 0.0;

    if (p.random_starts > 0) {
      std::seed_seq seq{sc.seed, std::uint64_t{0x5747}};
      std::mt19937_64 rng(seq);
      std::size_t violations = 0;
      std::size_t failures = 0;
      double worst_ratio = 0.0;
      double worst_post = 0.0;
      for (int k = 0; k < p.random_starts; ++k) {
        StateVec x0(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < x0.size(); ++i) {
          std::uniform_real_distribution<double> u(p.box->lower[i], p.box->upper[i]);
          x0[i] = u(rng);
        }
        try {
          const StaticRun trial = simulate_static(fb, slave, reference, x0, p.t_end, opts);
          const double b = cert.valid ? cert.hit_bound(x0, reference.state(0.0)) : kInf;
          if (!cert.valid || !trial.hitting_time || *trial.hitting_time > b) ++violations;
          if (trial.hitting_time) {
            worst_ratio = std::max(worst_ratio, std::isfinite(b) && b > 0.0 ? *trial.hitting_time / b : kInf);
            worst_post = std::max(worst_post, *trial.report.scalar("post_hit_max_error"));
          } else {
            worst_ratio = kInf;
          }
        } catch (const Error&) {
          ++failures;
          ++violations;
          worst_ratio = kInf;
        }
      }
      r.scalars["random_starts"] = p.random_starts;
      r.scalars["random_start_violations"] = static_cast<double>(violations);
      r.scalars["random_start_failures"] = static_cast<double>(failures);
      r.scalars["random_start_worst_hit_ratio"] = worst_ratio;
      r.scalars["random_start_max_post_hit_error"] = worst_post;
    }
  }

  out.trace.header = trace_header(n, false);
  const auto& ts = run.trajectory.times();
  const auto& xs = run.trajectory.states();
  for (std::size_t k = 0; k < ts.size(); k += sc.trace_stride) push_row(out.trace, ts[k], xs[k], reference.state(ts[k]));

  if (sc.plots) {
    Figure fig{sc.name + ": x1(t) and y0,1(t)", {}};
    fig.panels.push_back(trace_panel(out.trace, "full horizon", 0.0, p.t_end));
    if (run.hitting_time) {
      const double h = *run.hitting_time;
      const double a = std::max(0.0, h - 0.25);
      const double b = std::min(p.t_end, h + 0.25);
      fig.panels.push_back(trace_panel(out.trace, "zoom around the hitting time", a, b));
    }
    out.figures.emplace_back("x1.svg", std::move(fig));

    Figure v{sc.name + ": V(e) = sum |e_i|", {}};
    Panel vp{"Lyapunov function", "t", "V", {}};
    Series s{"V", {}, {}, LineStyle::Solid};
    for (std::size_t k = 0; k < ts.size(); k += sc.trace_stride) {
      s.x.push_back(ts[k]);
      s.y.push_back(run.lyapunov[k]);
    }
    vp.series.push_back(std::move(s));
    v.panels.push_back(std::move(vp));
    out.figures.emplace_back("lyapunov.svg", std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------- dynamic

ScenarioResult execute_dynamic(const Scenario& sc) {
  const DynamicParams& p = sc.dynamic();
  const VectorField slave = models::make(p.slave);
  const std::size_t n = slave.dimension();
  const Reference reference = make_reference(p.master, p.t_end);
  const DynamicFeedback fb(p.b, SymMatrix(p.c), p.epsilon, to_vec(p.xi0));
  DynamicSimOptions opts;
  opts.step = p.step;
  if (p.u_init) opts.u_init = to_vec(*p.u_init);
  const DynamicRun run = p.perturbation.active()
                             ? simulate_dynamic_perturbed(fb, slave, reference, sine_forcing(p.perturbation, n),
                                                          p.t_end, opts)
                             : simulate_dynamic(fb, slave, reference, p.t_end, opts);

  ScenarioResult out;
  out.report = run.report;
  out.trace.header = trace_header(n, true);
  const auto& ts = run.x.times();
  for (std::size_t k = 0; k < ts.size(); k += sc.trace_stride) {
    push_row(out.trace, ts[k], run.x.states()[k], reference.state(ts[k]), &run.u.states()[k]);
  }

  if (sc.plots) {
    Figure fig{sc.name + ": x1(t) and y0,1(t)", {}};
    fig.panels.push_back(trace_panel(out.trace, "full horizon", 0.0, p.t_end));
    const double c = 2.0 * std::numbers::pi;
    if (p.t_end > c) fig.panels.push_back(trace_panel(out.trace, "zoom around t = 2 pi", c - 0.3, std::min(p.t_end, c + 0.3)));
    out.figures.emplace_back("x1.svg", std::move(fig));

    Figure uf{sc.name + ": control u(t) and equivalent control u0(t)", {}};
    for (std::size_t i = 0; i < n; ++i) {
      Panel pu{"component " + std::to_string(i + 1), "t", "u" + std::to_string(i + 1), {}};
      Series s{"u", {}, {}, LineStyle::Solid};
      const std::size_t col = out.trace.column("u_" + std::to_string(i + 1));
      for (const auto& row : out.trace.rows) {
        s.x.push_back(row[0]);
        s.y.push_back(row[col]);
      }
      pu.series.push_back(std::move(s));
      pu.series.push_back(sample(
          "u0", 0.0, p.t_end,
          [&](double t) { return equivalent_control(fb, slave, reference, t)[static_cast<Eigen::Index>(i)]; },
          LineStyle::Dashed));
      uf.panels.push_back(std::move(pu));
    }
    uf.panel_height = 220;
    out.figures.emplace_back("control.svg", std::move(uf));
  }
  return out;
}

}  // namespace

int exit_code_for(const Error& error) {
  switch (error.kind()) {
    case ErrorKind::ConfigError:
    case ErrorKind::UnknownModel:
    case ErrorKind::InvalidArgument:
    case ErrorKind::NotSymmetric:
    case ErrorKind::SingularB:
      return kExitConfigError;
    default:
      return kExitSimulationFailure;
  }
}

Reference make_reference(const MasterSpec& master, double t_end) {
  const VectorField field = models::make(master.model);
  if (master.path == "orbit") {
    if (master.model != "forced_master_nn") {
      throw Error(ErrorKind::ConfigError, "closed-form orbit is only available for forced_master_nn");
    }
    return Reference(field, models::master_orbit, 0.0, t_end);
  }
  const std::vector<double>& seed = master.x0.empty() ? models::info(master.model).default_seed : master.x0;
  Trajectory tr = integrate_adaptive(field, to_vec(seed), 0.0, t_end, 1e-12, 1e-12, 0.01);
  return Reference::from_trajectory(field, std::move(tr));
}

ScenarioResult execute(const Scenario& scenario) {
  ScenarioResult out;
  switch (scenario.kind) {
    case ScenarioKind::Phase: out = execute_phase(scenario); break;
    case ScenarioKind::Static: out = execute_static(scenario); break;
    case ScenarioKind::Dynamic: out = execute_dynamic(scenario); break;
  }
  apply_thresholds(out.report, scenario.thresholds);
  return out;
}

CertificateResult certify(const Scenario& scenario) {
  if (scenario.kind != ScenarioKind::Static) {
    throw Error(ErrorKind::ConfigError, "certify needs a static scenario");
  }
  const StaticParams& p = scenario.static_params();
  if (!p.box) throw Error(ErrorKind::ConfigError, "certify needs static.box");
  const VectorField slave = models::make(p.slave);
  const Reference reference = make_reference(p.master, p.t_end);
  const StaticFeedback fb(p.gains, p.mode);
  CertificateResult r{certify_gains(fb, slave, reference, *p.box, certify_options(scenario)), kInf};
  if (r.certificate.valid) r.hit_bound = r.certificate.hit_bound(to_vec(p.x0), reference.state(0.0));
  return r;
}

RunOutcome run_scenario(const std::filesystem::path& config, const RunOptions& options) {
  Scenario sc;
  try {
    sc = load_scenario(config);
  } catch (const Error& e) {
    if (options.log) *options.log << "config error: " << e.what() << "\n";
    return RunOutcome{exit_code_for(e), std::nullopt, e.what(), {}};
  }
  return run_scenario(std::move(sc), options);
}

RunOutcome run_scenario(Scenario sc, const RunOptions& options) {
  RunOutcome out;
  if (options.seed) sc.seed = *options.seed;
  out.out_dir = !options.out_dir.empty() ? options.out_dir
                : !sc.output.empty()    ? sc.output
                                        : std::filesystem::path("out") / sc.name;
  ScenarioResult result;
  try {
    result = execute(sc);
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e);
    out.message = e.what();
    if (options.log) {
      *options.log << (out.exit_code == kExitConfigError ? "config error: " : "simulation failed: ") << e.what() << "\n";
    }
    return out;
  }
  out.report = result.report;
  if (options.write_artifacts) {
    try {
      std::filesystem::create_directories(out.out_dir);
      write_csv(out.out_dir / "trace.csv", result.trace);
      write_report(out.out_dir / "report.json", result.report, sc.name);
      for (const auto& [name, fig] : result.figures) write_svg(out.out_dir / name, fig);
    } catch (const std::exception& e) {
      out.exit_code = kExitSimulationFailure;
      out.message = std::string("cannot write artifacts: ") + e.what();
      if (options.log) *options.log << out.message << "\n";
      return out;
    }
  }
  if (options.log) {
    for (const auto& c : result.report.checks) {
      *options.log << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.metric << " = " << format_double(c.value)
                   << (c.comparison == Comparison::LessEqual ? " <= " : " >= ") << format_double(c.threshold) << "\n";
    }
  }
  out.exit_code = result.report.passed() ? kExitPass : kExitThresholdFailure;
  out.message = result.report.passed() ? "all thresholds passed" : "threshold failure";
  return out;
}

}  // namespace synclab::harness
