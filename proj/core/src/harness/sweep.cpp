#include "synclab/harness/sweep.hpp"

#include "config_node.hpp"
#include "synclab/error.hpp"
#include "synclab/harness/csv.hpp"
#include "synclab/harness/runner.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace synclab::harness {

namespace {

struct Axis {
  std::string key;
  std::vector<YAML::Node> values;
};

std::string node_text(const YAML::Node& n) {
  if (n.IsScalar()) return n.Scalar();
  YAML::Emitter e;
  e << YAML::Flow << n;
  return e.c_str();
}

void assign(YAML::Node root, const std::string& dotted, const YAML::Node& value) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  if (parts.empty()) throw Error(ErrorKind::ConfigError, "sweep: empty axis key");
  YAML::Node cur = root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = cur[parts[i]];
    if (!next.IsDefined() || next.IsNull()) {
      throw Error(ErrorKind::ConfigError, "sweep: axis key '" + dotted + "' does not name a config section");
    }
    cur.reset(next);
  }
  cur[parts.back()] = YAML::Clone(value);
}

}  // namespace

SweepTable run_sweep_text(const std::string& text, std::optional<std::uint64_t> seed) {
  const YAML::Node root = detail::load_yaml(text);
  if (!root.IsMap() || !root["sweep"]) throw Error(ErrorKind::ConfigError, "sweep: missing 'sweep' section");
  const YAML::Node sweep = root["sweep"];
  if (!sweep.IsMap()) throw Error(ErrorKind::ConfigError, "sweep: expected a mapping");
  for (const auto& kv : sweep) {
    const auto key = kv.first.as<std::string>();
    if (key != "axes" && key != "metrics") throw Error(ErrorKind::ConfigError, "sweep." + key + ": unknown key");
  }

  std::vector<Axis> axes;
  if (const YAML::Node list = sweep["axes"]) {
    if (!list.IsSequence()) throw Error(ErrorKind::ConfigError, "sweep.axes: expected a list");
    for (const auto& a : list) {
      if (!a.IsMap() || !a["key"] || !a["values"] || !a["values"].IsSequence() || a.size() != 2) {
        throw Error(ErrorKind::ConfigError, "sweep.axes: each axis needs exactly 'key' and a 'values' list");
      }
      Axis axis{a["key"].as<std::string>(), {}};
      for (const auto& v : a["values"]) axis.values.push_back(v);
      axes.push_back(std::move(axis));
    }
  }
  std::optional<std::vector<std::string>> metrics;
  if (const YAML::Node m = sweep["metrics"]) {
    if (!m.IsSequence()) throw Error(ErrorKind::ConfigError, "sweep.metrics: expected a list");
    metrics.emplace();
    for (const auto& v : m) metrics->push_back(v.as<std::string>());
  }

  YAML::Node base = YAML::Clone(root);
  base.remove("sweep");
  // Validate the base scenario up front so a broken file fails as a whole.
  (void)detail::scenario_from_node(base);

  std::size_t total = axes.empty() ? 0 : 1;
  for (const auto& a : axes) total *= a.values.size();

  struct Row {
    std::vector<std::string> axis_values;
    std::map<std::string, double> scalars;
    std::string passed;
    std::string error;
  };
  std::vector<Row> rows;
  rows.reserve(total);
  for (std::size_t index = 0; index < total; ++index) {
    Row row;
    YAML::Node node = YAML::Clone(base);
    std::size_t rest = index;
    std::vector<std::size_t> pick(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      pick[a] = rest % axes[a].values.size();
      rest /= axes[a].values.size();
    }
    try {
      for (std::size_t a = 0; a < axes.size(); ++a) {
        row.axis_values.push_back(node_text(axes[a].values[pick[a]]));
        assign(node, axes[a].key, axes[a].values[pick[a]]);
      }
      Scenario sc = detail::scenario_from_node(node);
      if (seed) sc.seed = *seed;
      sc.plots = false;
      const ScenarioResult res = execute(sc);
      row.scalars = res.report.scalars;
      row.passed = res.report.passed() ? "1" : "0";
    } catch (const std::exception& e) {
      row.axis_values.resize(axes.size());
      for (std::size_t a = 0; a < axes.size(); ++a) row.axis_values[a] = node_text(axes[a].values[pick[a]]);
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::string> columns;
  if (metrics) {
    columns = *metrics;
  } else {
    std::set<std::string> all;
    for (const auto& r : rows) {
      for (const auto& kv : r.scalars) all.insert(kv.first);
    }
    columns.assign(all.begin(), all.end());
  }

  SweepTable table;
  for (const auto& a : axes) table.header.push_back(a.key);
  table.header.insert(table.header.end(), columns.begin(), columns.end());
  table.header.push_back("passed");
  table.header.push_back("error");
  for (const auto& r : rows) {
    std::vector<std::string> cells = r.axis_values;
    for (const auto& c : columns) {
      auto it = r.scalars.find(c);
      cells.push_back(it == r.scalars.end() ? "" : format_double(it->second));
    }
    cells.push_back(r.passed);
    cells.push_back(r.error);
    table.rows.push_back(std::move(cells));
  }
  return table;
}

SweepTable run_sweep(const std::filesystem::path& config, std::optional<std::uint64_t> seed) {
  std::ifstream in(config);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config " + config.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return run_sweep_text(buf.str(), seed);
}

std::string sweep_to_csv(const SweepTable& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

}  // namespace synclab::harness
