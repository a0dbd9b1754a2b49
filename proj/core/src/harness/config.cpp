#include "synclab/harness/config.hpp"

#include "config_node.hpp"
#include "synclab/error.hpp"
#include "synclab/models.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace synclab::harness {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Phase: return "phase";
    case ScenarioKind::Static: return "static";
    case ScenarioKind::Dynamic: return "dynamic";
  }
  return "unknown";
}

double parse_number(const std::string& raw) {
  std::string text;
  for (char ch : raw) {
    if (ch != ' ' && ch != '*') text.push_back(ch);
  }
  double factor = 1.0;
  if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    text.resize(text.size() - 2);
    if (text.empty() || text == "+") return factor;
    if (text == "-") return -factor;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, "not a number: '" + raw + "'");
  }
  if (used != text.size()) throw Error(ErrorKind::ConfigError, "not a number: '" + raw + "'");
  return v * factor;
}

namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  if (m.line < 0) return "";
  return " (line " + std::to_string(m.line + 1) + ")";
}

[[noreturn]] void fail(const std::string& path, const std::string& msg, const YAML::Node& node = {}) {
  throw Error(ErrorKind::ConfigError, path + ": " + msg + (node.IsDefined() ? where(node) : ""));
}

/// A mapping whose keys must all be consumed; leftovers are typos.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) fail(path_, "expected a mapping", node_);
  }

  [[nodiscard]] bool has(const std::string& key) {
    seen_.insert(key);
    return static_cast<bool>(node_[key]);
  }
  [[nodiscard]] YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return node_[key];
  }
  [[nodiscard]] std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    YAML::Node n = raw(key);
    if (!n) {
      if (fallback) return *fallback;
      fail(child_path(key), "required number missing", node_);
    }
    return as_number(n, child_path(key));
  }
  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    YAML::Node n = raw(key);
    if (!n) {
      if (fallback) return *fallback;
      fail(child_path(key), "required value missing", node_);
    }
    if (!n.IsScalar()) fail(child_path(key), "expected a scalar", n);
    return n.Scalar();
  }
  bool flag(const std::string& key, bool fallback) {
    YAML::Node n = raw(key);
    if (!n) return fallback;
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(child_path(key), "expected true or false", n);
    }
  }
  std::vector<double> vector(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) {
    YAML::Node n = raw(key);
    if (!n) {
      if (fallback) return *fallback;
      fail(child_path(key), "required list missing", node_);
    }
    return as_vector(n, child_path(key));
  }

  static double as_number(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) fail(path, "expected a number", n);
    try {
      return parse_number(n.Scalar());
    } catch (const Error&) {
      fail(path, "not a number: '" + n.Scalar() + "'", n);
    }
  }
  static std::vector<double> as_vector(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence()) fail(path, "expected a list of numbers", n);
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_number(n[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  void finish() const {
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(child_path(key), "unknown key", kv.first);
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require_model(const std::string& name, const std::string& path) {
  try {
    (void)models::info(name);
  } catch (const Error&) {
    throw Error(ErrorKind::ConfigError, path + ": unknown model '" + name + "'");
  }
}

void require_dim(const std::vector<double>& v, std::size_t n, const std::string& path) {
  if (v.size() != n) {
    throw Error(ErrorKind::ConfigError,
                path + ": expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
  }
}

std::size_t model_dim(const std::string& name) { return models::make(name).dimension(); }

/// Square matrix given either as a list of rows or as a diagonal list.
Matrix read_matrix(const YAML::Node& n, std::size_t dim, const std::string& path) {
  if (!n) fail(path, "required matrix missing");
  if (!n.IsSequence() || n.size() != dim) fail(path, "expected " + std::to_string(dim) + " rows or diagonal entries", n);
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix m = Matrix::Zero(d, d);
  if (n[0].IsSequence()) {
    for (std::size_t i = 0; i < dim; ++i) {
      const auto row = Section::as_vector(n[i], path + "[" + std::to_string(i) + "]");
      require_dim(row, dim, path + "[" + std::to_string(i) + "]");
      for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  } else {
    const auto diag = Section::as_vector(n, path);
    for (std::size_t i = 0; i < dim; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
  }
  return m;
}

MasterSpec read_master(Section& s, const std::string& path, std::size_t dim) {
  MasterSpec m;
  m.model = s.text("master", m.model);
  require_model(m.model, s.child_path("master"));
  m.path = s.text("master_path", m.path);
  if (m.path != "orbit" && m.path != "integrate") fail(s.child_path("master_path"), "expected orbit or integrate");
  if (m.path == "orbit" && m.model != "forced_master_nn") {
    fail(s.child_path("master_path"), "closed-form orbit is only available for forced_master_nn");
  }
  m.x0 = s.vector("master_x0", std::vector<double>{});
  if (!m.x0.empty()) require_dim(m.x0, model_dim(m.model), s.child_path("master_x0"));
  if (model_dim(m.model) != dim) fail(path, "slave and master dimensions differ");
  return m;
}

Forcing read_forcing(Section& parent, const std::string& key) {
  Forcing f;
  if (!parent.has(key)) return f;
  Section s(parent.raw(key), parent.child_path(key));
  f.amplitude = s.number("amplitude");
  f.frequency = s.number("frequency", 1.0);
  s.finish();
  return f;
}

PhaseParams read_phase(Section& s) {
  PhaseParams p;
  p.model = s.text("model", p.model);
  require_model(p.model, s.child_path("model"));
  p.master_model = s.text("master_model", p.model);
  require_model(p.master_model, s.child_path("master_model"));
  const auto& info = models::info(p.model);
  if (info.period_guess <= 0.0 && !s.has("period_guess")) {
    fail(s.child_path("model"), "model has no period guess; set period_guess");
  }
  const std::size_t n = model_dim(p.model);
  if (model_dim(p.master_model) != n) fail(s.child_path("master_model"), "dimension differs from model");
  p.cycle_seed = s.vector("cycle_seed", info.default_seed);
  require_dim(p.cycle_seed, n, s.child_path("cycle_seed"));
  p.period_guess = s.number("period_guess", info.period_guess);
  if (s.has("anchor")) {
    p.anchor = s.vector("anchor");
    require_dim(*p.anchor, n, s.child_path("anchor"));
  }
  p.epsilon = s.number("epsilon", p.epsilon);
  p.delta = s.number("delta", p.delta);
  if (p.epsilon < 0.0) fail(s.child_path("epsilon"), "must be non-negative");
  if (p.delta < 0.0) fail(s.child_path("delta"), "must be non-negative");
  p.x0 = s.vector("x0");
  require_dim(p.x0, n, s.child_path("x0"));
  const double periods = s.number("periods", p.periods);
  if (periods < 2 || periods != std::floor(periods)) fail(s.child_path("periods"), "must be an integer >= 2");
  p.periods = static_cast<int>(periods);
  p.control_run = s.flag("control_run", p.control_run);
  p.rtol = s.number("rtol", p.rtol);
  p.atol = s.number("atol", p.atol);
  s.finish();
  return p;
}

StaticParams read_static(Section& s) {
  StaticParams p;
  p.slave = s.text("slave", p.slave);
  require_model(p.slave, s.child_path("slave"));
  const std::size_t n = model_dim(p.slave);
  p.master = read_master(s, s.child_path("master"), n);
  p.gains = s.vector("gains");
  if (p.gains.size() == 1) p.gains.assign(n, p.gains[0]);
  require_dim(p.gains, n, s.child_path("gains"));
  for (double b : p.gains) {
    if (!(b < 0.0)) fail(s.child_path("gains"), "every gain must be negative");
  }
  const std::string mode = s.text("mode", "raw");
  if (mode == "raw") {
    p.mode = SlidingMode::Raw;
  } else if (mode == "filippov") {
    p.mode = SlidingMode::FilippovSliding;
  } else {
    fail(s.child_path("mode"), "expected raw or filippov");
  }
  p.x0 = s.vector("x0");
  require_dim(p.x0, n, s.child_path("x0"));
  p.t_end = s.number("t_end", p.t_end);
  if (!(p.t_end > 0.0)) fail(s.child_path("t_end"), "must be positive");
  p.step = s.number("step", p.step);
  if (!(p.step > 0.0)) fail(s.child_path("step"), "must be positive");
  p.hit_tolerance = s.number("hit_tolerance", p.hit_tolerance);
  if (s.has("box")) {
    Section b(s.raw("box"), s.child_path("box"));
    const auto lo = b.vector("lower");
    const auto hi = b.vector("upper");
    b.finish();
    require_dim(lo, n, b.child_path("lower"));
    require_dim(hi, n, b.child_path("upper"));
    Box box{Eigen::Map<const StateVec>(lo.data(), static_cast<Eigen::Index>(n)),
            Eigen::Map<const StateVec>(hi.data(), static_cast<Eigen::Index>(n))};
    if ((box.upper - box.lower).minCoeff() < 0.0) fail(b.child_path("upper"), "upper corner below lower corner");
    p.box = box;
  }
  if (s.has("certify")) {
    Section c(s.raw("certify"), s.child_path("certify"));
    const double samples = c.number("samples", static_cast<double>(p.certify_samples));
    if (samples < 1 || samples != std::floor(samples)) fail(c.child_path("samples"), "must be a positive integer");
    p.certify_samples = static_cast<std::size_t>(samples);
    p.certify_safety = c.number("safety_factor", p.certify_safety);
    p.certify_inflation = c.number("inflation", p.certify_inflation);
    p.certify_horizon = c.number("horizon", p.certify_horizon);
    c.finish();
  }
  const double starts = s.number("random_starts", 0.0);
  if (starts < 0 || starts != std::floor(starts)) fail(s.child_path("random_starts"), "must be a non-negative integer");
  p.random_starts = static_cast<int>(starts);
  if ((p.random_starts > 0 || s.has("certify")) && !p.box) {
    fail(s.child_path("box"), "certification and random starts need a box");
  }
  p.disturbance = read_forcing(s, "disturbance");
  s.finish();
  return p;
}

DynamicParams read_dynamic(Section& s) {
  DynamicParams p;
  p.slave = s.text("slave", p.slave);
  require_model(p.slave, s.child_path("slave"));
  const std::size_t n = model_dim(p.slave);
  p.master = read_master(s, s.child_path("master"), n);
  p.b = read_matrix(s.raw("B"), n, s.child_path("B"));
  p.c = read_matrix(s.raw("C"), n, s.child_path("C"));
  p.epsilon = s.number("epsilon", p.epsilon);
  if (!(p.epsilon > 0.0)) fail(s.child_path("epsilon"), "must be positive");
  p.xi0 = s.vector("xi0");
  require_dim(p.xi0, n, s.child_path("xi0"));
  p.t_end = s.number("t_end");
  if (!(p.t_end > 0.0)) fail(s.child_path("t_end"), "must be positive");
  p.step = s.number("step", 0.0);
  if (p.step < 0.0) fail(s.child_path("step"), "must be non-negative");
  if (s.has("u_init")) {
    p.u_init = s.vector("u_init");
    require_dim(*p.u_init, n, s.child_path("u_init"));
  }
  p.perturbation = read_forcing(s, "perturbation");
  s.finish();
  return p;
}

std::vector<ThresholdSpec> read_thresholds(const YAML::Node& n) {
  std::vector<ThresholdSpec> out;
  if (!n) return out;
  if (!n.IsSequence()) fail("thresholds", "expected a list", n);
  for (std::size_t i = 0; i < n.size(); ++i) {
    Section s(n[i], "thresholds[" + std::to_string(i) + "]");
    ThresholdSpec t;
    t.metric = s.text("metric");
    t.name = s.text("name", t.metric);
    const std::string op = s.text("op");
    if (op == "<=") {
      t.comparison = Comparison::LessEqual;
    } else if (op == ">=") {
      t.comparison = Comparison::GreaterEqual;
    } else {
      fail(s.child_path("op"), "expected <= or >=");
    }
    t.value = s.number("value");
    s.finish();
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

namespace detail {

YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("malformed config: ") + e.what());
  }
}

Scenario scenario_from_node(const YAML::Node& root) {
  if (!root || root.IsNull()) throw Error(ErrorKind::ConfigError, "empty config");
  Section top(root, "");
  Scenario sc;
  sc.name = top.text("name", "scenario");
  const std::string kind = top.text("kind");
  const double seed = top.number("seed", 1.0);
  if (seed < 0 || seed != std::floor(seed)) fail("seed", "must be a non-negative integer");
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.output = top.text("output", "");
  const double stride = top.number("trace_stride", 1.0);
  if (stride < 1 || stride != std::floor(stride)) fail("trace_stride", "must be a positive integer");
  sc.trace_stride = static_cast<std::size_t>(stride);
  sc.plots = top.flag("plots", true);

  auto section = [&](const char* key) {
    if (!top.has(key)) fail(key, std::string("kind '") + kind + "' needs a '" + key + "' section");
    return Section(top.raw(key), key);
  };
  if (kind == "phase") {
    sc.kind = ScenarioKind::Phase;
    Section s = section("phase");
    sc.params = read_phase(s);
  } else if (kind == "static") {
    sc.kind = ScenarioKind::Static;
    Section s = section("static");
    sc.params = read_static(s);
  } else if (kind == "dynamic") {
    sc.kind = ScenarioKind::Dynamic;
    Section s = section("dynamic");
    sc.params = read_dynamic(s);
  } else {
    fail("kind", "expected phase, static or dynamic, got '" + kind + "'");
  }
  for (const char* other : {"phase", "static", "dynamic"}) {
    if (other != kind && top.has(other)) fail(other, "section does not match kind '" + kind + "'");
  }
  sc.thresholds = read_thresholds(top.raw("thresholds"));
  (void)top.has("sweep");  // consumed by the sweep driver
  top.finish();
  return sc;
}

}  // namespace detail

Scenario parse_scenario(const std::string& text) { return detail::scenario_from_node(detail::load_yaml(text)); }

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace synclab::harness
