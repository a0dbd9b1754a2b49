#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace synclab::harness {

/// Text table: one row per grid point. Columns are the swept keys, the report
/// scalars, "passed" and "error" (empty unless the row failed).
struct SweepTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// A sweep config is a scenario plus a `sweep` section:
///
///   sweep:
///     axes:
///       - key: dynamic.epsilon
///         values: [0.01, 0.003, 0.001]
///     metrics: [tail_error]      # optional; default is every scalar
///
/// The grid is the Cartesian product of the axes, first axis slowest. A row
/// that fails records its message in the error column; the sweep carries on.
/// Config errors in the sweep section itself throw ConfigError.
[[nodiscard]] SweepTable run_sweep_text(const std::string& text, std::optional<std::uint64_t> seed = std::nullopt);
[[nodiscard]] SweepTable run_sweep(const std::filesystem::path& config,
                                   std::optional<std::uint64_t> seed = std::nullopt);

[[nodiscard]] std::string sweep_to_csv(const SweepTable& table);

}  // namespace synclab::harness
