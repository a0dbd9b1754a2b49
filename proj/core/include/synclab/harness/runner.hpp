#pragma once

#include "synclab/error.hpp"
#include "synclab/harness/config.hpp"
#include "synclab/harness/csv.hpp"
#include "synclab/harness/svg.hpp"
#include "synclab/reference.hpp"
#include "synclab/sliding_sync.hpp"
#include "synclab/sync_report.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace synclab::harness {

enum ExitCode : int {
  kExitPass = 0,
  kExitThresholdFailure = 1,
  kExitConfigError = 2,
  kExitSimulationFailure = 3,
};

/// Exit code for a library error: parameter and config problems map to 2,
/// numerical failures to 3.
[[nodiscard]] int exit_code_for(const Error& error);

/// Everything a scenario produces before it touches the disk.
struct ScenarioResult {
  SyncReport report;
  Table trace;
  std::vector<std::pair<std::string, Figure>> figures;  // file name, figure
};

/// y0 over [0, t_end] for the static and dynamic controllers.
[[nodiscard]] Reference make_reference(const MasterSpec& master, double t_end);

/// Runs the pipeline for the scenario kind and evaluates its thresholds.
/// Throws synclab::Error on failure.
[[nodiscard]] ScenarioResult execute(const Scenario& scenario);

struct CertificateResult {
  GainCertificate certificate;
  double hit_bound = 0.0;  // for the scenario's x0; inf when invalid
};

/// Gain certificate of a static scenario (which must declare a box).
[[nodiscard]] CertificateResult certify(const Scenario& scenario);

struct RunOptions {
  std::filesystem::path out_dir;  // overrides the scenario's output key
  std::optional<std::uint64_t> seed;
  bool write_artifacts = true;
  std::ostream* log = nullptr;  // progress and error messages; null for silence
};

struct RunOutcome {
  int exit_code = kExitPass;
  std::optional<SyncReport> report;
  std::string message;
  std::filesystem::path out_dir;
};

/// Loads, runs and writes trace.csv, report.json and the SVG plots.
[[nodiscard]] RunOutcome run_scenario(const std::filesystem::path& config, const RunOptions& options = {});
[[nodiscard]] RunOutcome run_scenario(Scenario scenario, const RunOptions& options = {});

}  // namespace synclab::harness
