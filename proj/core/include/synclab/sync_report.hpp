#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace synclab {

enum class Comparison { LessEqual, GreaterEqual };

/// One pass/fail threshold evaluated against a metric.
struct ThresholdCheck {
  std::string name;
  std::string metric;
  Comparison comparison = Comparison::LessEqual;
  double threshold = 0.0;
  double value = 0.0;
  bool passed = false;
};

/// Per-run metrics. Scalars and per-component/per-period series are keyed by
/// name so the same structure serves all three controller kinds.
struct SyncReport {
  std::string kind;
  std::map<std::string, double> scalars;
  std::map<std::string, std::vector<double>> series;
  std::vector<ThresholdCheck> checks;

  [[nodiscard]] std::optional<double> scalar(const std::string& key) const {
    auto it = scalars.find(key);
    if (it == scalars.end()) return std::nullopt;
    return it->second;
  }
  [[nodiscard]] bool passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
  /// Evaluates and records a check; a missing metric fails.
  const ThresholdCheck& check(const std::string& name, const std::string& metric, Comparison cmp,
                              double threshold) {
    ThresholdCheck c{name, metric, cmp, threshold, 0.0, false};
    if (auto v = scalar(metric)) {
      c.value = *v;
      c.passed = cmp == Comparison::LessEqual ? *v <= threshold : *v >= threshold;
    }
    checks.push_back(c);
    return checks.back();
  }
};

}  // namespace synclab
