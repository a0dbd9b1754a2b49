#include "synclab/harness/report.hpp"

#include "synclab/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>

namespace synclab::harness {

namespace {

using nlohmann::json;

json encode(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double decode(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorKind::ConfigError, "expected a number in report, got " + j.dump());
}

}  // namespace

std::string report_to_json(const SyncReport& report, const std::string& scenario) {
  json j;
  if (!scenario.empty()) j["scenario"] = scenario;
  j["kind"] = report.kind;
  j["passed"] = report.passed();
  json scalars = json::object();
  for (const auto& [k, v] : report.scalars) scalars[k] = encode(v);
  j["scalars"] = scalars;
  json series = json::object();
  for (const auto& [k, values] : report.series) {
    json arr = json::array();
    for (double v : values) arr.push_back(encode(v));
    series[k] = arr;
  }
  j["series"] = series;
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"metric", c.metric},
                      {"op", c.comparison == Comparison::LessEqual ? "<=" : ">="},
                      {"threshold", encode(c.threshold)},
                      {"value", encode(c.value)},
                      {"passed", c.passed}});
  }
  j["checks"] = checks;
  return j.dump(2) + "\n";
}

SyncReport report_from_json(const std::string& text) {
  SyncReport r;
  try {
    const json j = json::parse(text);
    r.kind = j.at("kind").get<std::string>();
    for (const auto& [k, v] : j.at("scalars").items()) r.scalars[k] = decode(v);
    for (const auto& [k, arr] : j.at("series").items()) {
      auto& out = r.series[k];
      for (const auto& v : arr) out.push_back(decode(v));
    }
    for (const auto& c : j.at("checks")) {
      ThresholdCheck t;
      t.name = c.at("name").get<std::string>();
      t.metric = c.at("metric").get<std::string>();
      t.comparison = c.at("op").get<std::string>() == "<=" ? Comparison::LessEqual : Comparison::GreaterEqual;
      t.threshold = decode(c.at("threshold"));
      t.value = decode(c.at("value"));
      t.passed = c.at("passed").get<bool>();
      r.checks.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("malformed report: ") + e.what());
  }
  return r;
}

void write_report(const std::filesystem::path& path, const SyncReport& report, const std::string& scenario) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
  out << report_to_json(report, scenario);
}

}  // namespace synclab::harness
