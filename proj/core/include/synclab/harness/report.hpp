#pragma once

#include "synclab/sync_report.hpp"

#include <filesystem>
#include <string>

namespace synclab::harness {

/// JSON text of a report. Non-finite numbers are written as the strings
/// "inf", "-inf" and "nan" so the document stays valid JSON.
[[nodiscard]] std::string report_to_json(const SyncReport& report, const std::string& scenario = {});
/// Inverse of report_to_json; throws ConfigError on malformed input.
[[nodiscard]] SyncReport report_from_json(const std::string& text);

void write_report(const std::filesystem::path& path, const SyncReport& report, const std::string& scenario = {});

}  // namespace synclab::harness
