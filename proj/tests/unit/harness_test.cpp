#include "synclab/error.hpp"
#include "synclab/harness/config.hpp"
#include "synclab/harness/csv.hpp"
#include "synclab/harness/report.hpp"
#include "synclab/harness/runner.hpp"
#include "synclab/harness/svg.hpp"
#include "synclab/harness/sweep.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace synclab::harness {
namespace {

namespace fs = std::filesystem;

const fs::path kScenarios = fs::path(SYNCLAB_SOURCE_DIR) / "scenarios";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "synclab_harness_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "scenario.cfg";
  std::ofstream(p) << text;
  return p;
}

const char* kQuickStatic = R"(
name: quick
kind: static
static:
  gains: [-20]
  mode: filippov
  x0: [-1, 1, 1]
  t_end: 0.5
  step: 1e-3
  box: {lower: [-2, -2, -2], upper: [2, 2, 2]}
  certify: {samples: 500}
thresholds:
  - {name: hit, metric: hit, op: ">=", value: 1}
)";

ErrorKind kind_of(const std::string& text) {
  try {
    (void)parse_scenario(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;  // sentinel: nothing thrown
}

TEST(ParseNumber, PlainAndPiMultiples) {
  EXPECT_DOUBLE_EQ(parse_number("1e-3"), 1e-3);
  EXPECT_DOUBLE_EQ(parse_number("4pi"), 4.0 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_number("pi"), std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_number("-0.5pi"), -0.5 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_number("2*pi"), 2.0 * std::numbers::pi);
  EXPECT_THROW((void)parse_number("four"), Error);
  EXPECT_THROW((void)parse_number("1.5x"), Error);
}

TEST(Config, BundledScenariosParse) {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".cfg") continue;
    EXPECT_NO_THROW((void)load_scenario(entry.path())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 6u);
}

TEST(Config, ExampleOneValues) {
  const Scenario sc = load_scenario(kScenarios / "example1.cfg");
  EXPECT_EQ(sc.kind, ScenarioKind::Phase);
  EXPECT_EQ(sc.phase().epsilon, 0.01);
  EXPECT_EQ(sc.phase().delta, 0.05);
  EXPECT_EQ(sc.phase().x0, (std::vector<double>{5.0, -5.0}));
  ASSERT_TRUE(sc.phase().anchor.has_value());
  EXPECT_EQ(*sc.phase().anchor, (std::vector<double>{-0.7481, 1.5164}));
}

TEST(Config, MatricesAsRowsOrDiagonal) {
  const Scenario sc = parse_scenario(R"(
kind: dynamic
dynamic:
  B: [[-1, 0.5, 0], [-0.5, -1, 0], [0, 0, -2]]
  C: [-1, -2, -3]
  xi0: [-1, 1, 1]
  t_end: 2pi
)");
  EXPECT_EQ(sc.dynamic().b(0, 1), 0.5);
  EXPECT_EQ(sc.dynamic().c(2, 2), -3.0);
  EXPECT_EQ(sc.dynamic().c(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(sc.dynamic().t_end, 2.0 * std::numbers::pi);
}

TEST(Config, Errors) {
  EXPECT_EQ(kind_of(""), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: [unclosed"), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: nonsense"), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: phase"), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: phase\nphase: {x0: [5, -5]}\ntypo: 1"), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: phase\nphase: {x0: [5, -5], epsilom: 0.1}"), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: phase\nphase: {x0: [5, -5, 1]}"), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: phase\nphase: {x0: [5, -5], model: nosuch}"), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: phase\nphase: {x0: [5, -5], epsilon: -1}"), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: phase\nphase: {x0: [5, -5]}\nstatic: {}"), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: static\nstatic: {gains: [1], x0: [0, 0, 0]}"), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: static\nstatic: {gains: [-1], x0: [0, 0, 0], mode: smooth}"), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: static\nstatic: {gains: [-1], x0: [0, 0, 0], random_starts: 3}"), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: static\nstatic: {gains: [-1], x0: [0, 0, 0], master: fhn}"), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: dynamic\ndynamic: {B: [-1, -1], C: [-1, -1, -1], xi0: [0, 0, 0], t_end: 1}"),
            ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: phase\nphase: {x0: [5, -5]}\nthresholds: [{metric: a, op: '<', value: 1}]"),
            ErrorKind::ConfigError);
  EXPECT_EQ(kind_of("kind: phase\nphase: {x0: [5, -5]}"), ErrorKind::InvalidArgument);
}

TEST(Csv, SeventeenDigitsRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, (k % 40) - 20);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
}

TEST(Csv, TableAndQuoting) {
  Table t{{"t", "x_1"}, {{0.0, 1.5}, {0.25, -2.0}}};
  EXPECT_EQ(to_csv(t), "t,x_1\n0,1.5\n0.25,-2\n");
  EXPECT_EQ(t.column("x_1"), 1u);
  EXPECT_THROW((void)t.column("nope"), Error);
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("plain"), "plain");
}

TEST(Report, JsonRoundTripIsLossless) {
  SyncReport r;
  r.kind = "static";
  r.scalars["a"] = 0.1 + 0.2;
  r.scalars["big"] = 1.7976931348623157e308;
  r.scalars["tiny"] = 4.9406564584124654e-324;
  r.scalars["inf"] = std::numeric_limits<double>::infinity();
  r.scalars["ninf"] = -std::numeric_limits<double>::infinity();
  r.scalars["nan"] = std::numeric_limits<double>::quiet_NaN();
  r.series["s"] = {1.0, -2.5, std::numeric_limits<double>::infinity()};
  r.check("ok", "a", Comparison::LessEqual, 1.0);
  r.check("missing", "zzz", Comparison::GreaterEqual, 0.0);

  const SyncReport back = report_from_json(report_to_json(r, "name"));
  EXPECT_EQ(back.kind, r.kind);
  ASSERT_EQ(back.scalars.size(), r.scalars.size());
  for (const auto& [k, v] : r.scalars) {
    if (std::isnan(v)) {
      EXPECT_TRUE(std::isnan(back.scalars.at(k)));
    } else {
      EXPECT_EQ(back.scalars.at(k), v) << k;
    }
  }
  EXPECT_EQ(back.series.at("s"), r.series.at("s"));
  ASSERT_EQ(back.checks.size(), 2u);
  EXPECT_TRUE(back.checks[0].passed);
  EXPECT_FALSE(back.checks[1].passed);
  EXPECT_EQ(back.checks[1].comparison, Comparison::GreaterEqual);
  EXPECT_FALSE(back.passed());
  EXPECT_EQ(report_to_json(back, "name"), report_to_json(r, "name"));
  EXPECT_THROW((void)report_from_json("{\"kind\": 1}"), Error);
}

TEST(Svg, RendersPanelsStylesAndEscapes) {
  Figure f{"a < b & c", {}};
  Panel p{"panel", "t", "x1", {}};
  Series solid{"x", {}, {}, LineStyle::Solid};
  Series dotted{"y", {}, {}, LineStyle::Dotted};
  for (int k = 0; k <= 20000; ++k) {
    const double t = k * 1e-3;
    solid.x.push_back(t);
    solid.y.push_back(k == 12345 ? 7.0 : std::sin(t));
    dotted.x.push_back(t);
    dotted.y.push_back(std::cos(t));
  }
  p.series = {solid, dotted};
  f.panels = {p, p};
  const std::string svg = render_svg(f);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray=\"2,4\""), std::string::npos);
  std::size_t polylines = 0;
  for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos) ++polylines;
  EXPECT_EQ(polylines, 4u);
  // An isolated one-sample spike must survive the min/max reduction.
  Figure flat = f;
  for (auto& panel : flat.panels) panel.series[0].y[12345] = std::sin(12.345);
  EXPECT_NE(render_svg(flat), svg);
  EXPECT_LT(svg.size(), 600'000u);
}

TEST(Runner, ExitCodes) {
  const fs::path dir = scratch("exit_codes");
  EXPECT_EQ(run_scenario(write_config(dir, kQuickStatic), {dir / "pass"}).exit_code, kExitPass);

  std::string failing = kQuickStatic;
  failing.replace(failing.find("op: \">=\", value: 1"), 18, "op: \">=\", value: 2");
  EXPECT_EQ(run_scenario(write_config(dir, failing), {dir / "fail"}).exit_code, kExitThresholdFailure);

  EXPECT_EQ(run_scenario(write_config(dir, "kind: static\nstatic: {gains: [-1]}"), {dir / "cfg"}).exit_code,
            kExitConfigError);
  EXPECT_EQ(run_scenario(dir / "missing.cfg", {dir / "cfg"}).exit_code, kExitConfigError);

  // A continuum of cycles: the shooting method cannot converge.
  const RunOutcome sim = run_scenario(
      write_config(dir, "kind: phase\nphase: {model: harmonic, x0: [1, 0]}"), {dir / "sim"});
  EXPECT_EQ(sim.exit_code, kExitSimulationFailure);
  EXPECT_FALSE(fs::exists(dir / "sim" / "trace.csv"));
}

TEST(Runner, ArtifactsAndColumns) {
  const fs::path dir = scratch("artifacts");
  const RunOutcome out = run_scenario(write_config(dir, kQuickStatic), {dir / "out"});
  ASSERT_EQ(out.exit_code, kExitPass);
  for (const char* f : {"trace.csv", "report.json", "x1.svg", "lyapunov.svg"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  }
  const std::string trace = slurp(dir / "out" / "trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "t,x_1,x_2,x_3,y0_1,y0_2,y0_3,e_1,e_2,e_3");
  const SyncReport r = report_from_json(slurp(dir / "out" / "report.json"));
  EXPECT_EQ(r.kind, "static");
  for (const char* key : {"hitting_time", "t_hit_bound", "mu", "m_bound", "post_hit_max_error"}) {
    EXPECT_TRUE(r.scalar(key).has_value()) << key;
  }
  EXPECT_TRUE(r.passed());

  const RunOutcome dyn = run_scenario(write_config(dir, R"(
kind: dynamic
trace_stride: 5
dynamic: {B: [-1, -1, -1], C: [-1, -1, -1], epsilon: 0.01, xi0: [-1, 1, 1], t_end: 0.5}
)"),
                                      {dir / "dyn"});
  ASSERT_EQ(dyn.exit_code, kExitPass);
  const std::string dtrace = slurp(dir / "dyn" / "trace.csv");
  EXPECT_NE(dtrace.substr(0, dtrace.find('\n')).find(",u_1,u_2,u_3"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "dyn" / "control.svg"));
}

TEST(Runner, SameSeedGivesIdenticalTrace) {
  const fs::path dir = scratch("determinism");
  const fs::path cfg = write_config(dir, kQuickStatic);
  ASSERT_EQ(run_scenario(cfg, {dir / "a"}).exit_code, kExitPass);
  ASSERT_EQ(run_scenario(cfg, {dir / "b"}).exit_code, kExitPass);
  EXPECT_EQ(slurp(dir / "a" / "trace.csv"), slurp(dir / "b" / "trace.csv"));
  EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
}

TEST(Runner, SeedOverrideChangesCertificateSampling) {
  const Scenario sc = parse_scenario(kQuickStatic);
  Scenario other = sc;
  other.seed = 99;
  EXPECT_NE(certify(sc).certificate.m_bound, certify(other).certificate.m_bound);
  EXPECT_EQ(certify(sc).certificate.m_bound, certify(sc).certificate.m_bound);
}

TEST(Sweep, EmptyGridIsHeaderOnly) {
  const std::string text = std::string(kQuickStatic) + "sweep:\n  axes: []\n";
  const SweepTable t = run_sweep_text(text);
  EXPECT_TRUE(t.rows.empty());
  EXPECT_EQ(sweep_to_csv(t), "passed,error\n");
  const SweepTable t2 = run_sweep_text(std::string(kQuickStatic) +
                                       "sweep:\n  axes: [{key: static.step, values: []}]\n  metrics: [mu]\n");
  EXPECT_EQ(sweep_to_csv(t2), "static.step,mu,passed,error\n");
}

TEST(Sweep, RowFailuresAreRecorded) {
  const std::string text = std::string(kQuickStatic) +
                           "sweep:\n  axes: [{key: static.gains, values: [[-20], [3], [-30]]}]\n  metrics: [hitting_time]\n";
  const SweepTable t = run_sweep_text(text);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.header.back(), "error");
  EXPECT_TRUE(t.rows[0].back().empty());
  EXPECT_NE(t.rows[1].back().find("negative"), std::string::npos);
  EXPECT_TRUE(t.rows[2].back().empty());
  EXPECT_EQ(t.rows[1][0], "[3]");
  EXPECT_THROW((void)run_sweep_text(std::string(kQuickStatic) + "sweep:\n  axis: []\n"), Error);
}

TEST(Sweep, GainGridHittingTimeFallsWithGain) {
  const SweepTable t = run_sweep(kScenarios / "sweep_gains.cfg");
  const std::size_t hit = 1;
  const std::size_t valid = 3;
  ASSERT_EQ(t.header[hit], "hitting_time");
  ASSERT_EQ(t.header[valid], "certificate_valid");
  double prev = std::numeric_limits<double>::infinity();
  std::size_t certified = 0;
  for (const auto& row : t.rows) {
    if (row[valid] != "1") continue;
    ++certified;
    const double h = std::stod(row[hit]);
    EXPECT_LT(h, prev);
    prev = h;
  }
  EXPECT_GE(certified, 2u);
}

TEST(Sweep, EpsilonLadderAndDeterminism) {
  const SweepTable a = run_sweep(kScenarios / "sweep_epsilon.cfg");
  const SweepTable b = run_sweep(kScenarios / "sweep_epsilon.cfg");
  EXPECT_EQ(sweep_to_csv(a), sweep_to_csv(b));
  ASSERT_EQ(a.rows.size(), 3u);
  ASSERT_EQ(a.header[1], "tail_error");
  EXPECT_GT(std::stod(a.rows[0][1]), std::stod(a.rows[1][1]));
  EXPECT_GT(std::stod(a.rows[1][1]), std::stod(a.rows[2][1]));
}

}  // namespace
}  // namespace synclab::harness
