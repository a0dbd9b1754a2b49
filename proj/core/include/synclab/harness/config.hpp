#pragma once

#include "synclab/sliding_sync.hpp"
#include "synclab/sync_report.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace synclab::harness {

enum class ScenarioKind { Phase, Static, Dynamic };

[[nodiscard]] std::string to_string(ScenarioKind kind);

struct PhaseParams {
  std::string model = "fhn";
  std::string master_model;  // empty: same as model
  std::vector<double> cycle_seed;  // empty: catalog default
  double period_guess = 0.0;       // 0: catalog default
  std::optional<std::vector<double>> anchor;
  double epsilon = 0.01;
  double delta = 0.05;
  std::vector<double> x0;
  int periods = 50;
  bool control_run = false;
  double rtol = 1e-10;
  double atol = 1e-12;
};

/// How y0(t) is produced for the static and dynamic controllers.
struct MasterSpec {
  std::string model = "forced_master_nn";
  /// "orbit" uses the closed-form periodic solution of forced_master_nn;
  /// "integrate" integrates the master field from `x0`.
  std::string path = "orbit";
  std::vector<double> x0;  // empty: catalog default
};

struct Forcing {
  double amplitude = 0.0;
  double frequency = 0.0;
  [[nodiscard]] bool active() const { return amplitude != 0.0; }
};

struct StaticParams {
  std::string slave = "chaotic_cnn";
  MasterSpec master;
  std::vector<double> gains;
  SlidingMode mode = SlidingMode::Raw;
  std::vector<double> x0;
  double t_end = 12.0;
  double step = 1e-4;
  double hit_tolerance = 1e-3;
  std::optional<Box> box;
  std::size_t certify_samples = 10'000;
  double certify_safety = 1.25;
  double certify_inflation = 2.0;
  double certify_horizon = 0.0;  // 0: t_end
  int random_starts = 0;
  Forcing disturbance;  // amplitude * sin(frequency * t) on every component
};

struct DynamicParams {
  std::string slave = "chaotic_cnn";
  MasterSpec master;
  Matrix b;
  Matrix c;
  double epsilon = 0.001;
  std::vector<double> xi0;
  double t_end = 0.0;
  double step = 0.0;  // 0: eps / 20
  std::optional<std::vector<double>> u_init;
  Forcing perturbation;
};

struct ThresholdSpec {
  std::string name;
  std::string metric;
  Comparison comparison = Comparison::LessEqual;
  double value = 0.0;
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::Phase;
  std::uint64_t seed = 1;
  std::filesystem::path output;  // empty: caller decides
  std::size_t trace_stride = 1;
  bool plots = true;
  std::variant<PhaseParams, StaticParams, DynamicParams> params;
  std::vector<ThresholdSpec> thresholds;

  [[nodiscard]] const PhaseParams& phase() const { return std::get<PhaseParams>(params); }
  [[nodiscard]] const StaticParams& static_params() const { return std::get<StaticParams>(params); }
  [[nodiscard]] const DynamicParams& dynamic() const { return std::get<DynamicParams>(params); }
};

/// Parses scenario text. Unknown keys, missing required keys, malformed values
/// and references to unknown models all raise ConfigError.
[[nodiscard]] Scenario parse_scenario(const std::string& text);
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

/// Reads a number that may carry a trailing "pi" factor ("4pi", "0.5pi", "pi").
[[nodiscard]] double parse_number(const std::string& text);

}  // namespace synclab::harness
