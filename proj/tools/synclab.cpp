// synclab command-line front end.

#include "synclab/error.hpp"
#include "synclab/harness/config.hpp"
#include "synclab/harness/csv.hpp"
#include "synclab/harness/runner.hpp"
#include "synclab/harness/sweep.hpp"
#include "synclab/limit_cycle.hpp"
#include "synclab/models.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace synclab;
using namespace synclab::harness;

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_number(item));
  return out;
}

StateVec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const StateVec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
  out << text;
}

int cmd_run(const std::string& cfg, const std::string& out_dir, std::optional<std::uint64_t> seed, bool quiet) {
  RunOptions opts;
  opts.out_dir = out_dir;
  opts.seed = seed;
  opts.log = &std::cerr;
  if (quiet) opts.log = nullptr;
  const RunOutcome outcome = run_scenario(cfg, opts);
  if (quiet && outcome.exit_code >= kExitConfigError) std::cerr << outcome.message << "\n";
  if (!quiet && outcome.report) std::cout << "artifacts: " << outcome.out_dir.string() << "\n";
  if (!quiet && outcome.exit_code < kExitConfigError) std::cout << outcome.message << "\n";
  return outcome.exit_code;
}

int cmd_sweep(const std::string& cfg, const std::string& out_dir, std::optional<std::uint64_t> seed, bool quiet) {
  const SweepTable table = run_sweep(cfg, seed);
  const std::string csv = sweep_to_csv(table);
  if (!out_dir.empty()) {
    write_text(fs::path(out_dir) / "sweep.csv", csv);
    if (!quiet) std::cout << "wrote " << (fs::path(out_dir) / "sweep.csv").string() << "\n";
  } else {
    std::cout << csv;
  }
  return kExitPass;
}

int cmd_certify(const std::string& cfg, const std::string& out_dir, std::optional<std::uint64_t> seed, bool quiet) {
  Scenario sc = load_scenario(cfg);
  if (seed) sc.seed = *seed;
  const CertificateResult r = certify(sc);
  const GainCertificate& c = r.certificate;
  nlohmann::json j{{"scenario", sc.name},
                   {"m_bound", finite_or_string(c.m_bound)},
                   {"mu", finite_or_string(c.mu)},
                   {"valid", c.valid},
                   {"t_hit_bound", finite_or_string(c.t_hit_bound)},
                   {"hit_bound_x0", finite_or_string(r.hit_bound)},
                   {"samples", c.samples},
                   {"seed", sc.seed}};
  if (!out_dir.empty()) write_text(fs::path(out_dir) / "certificate.json", j.dump(2) + "\n");
  if (!quiet) {
    std::cout << "M_I:          " << format_double(c.m_bound) << "\n"
              << "mu_I:         " << format_double(c.mu) << "\n"
              << "valid:        " << (c.valid ? "yes" : "no (gains too small)") << "\n"
              << "t_hit bound:  " << format_double(c.t_hit_bound) << " (worst box corner)\n"
              << "bound for x0: " << format_double(r.hit_bound) << "\n";
  }
  return c.valid ? kExitPass : kExitThresholdFailure;
}

int cmd_limit_cycle(const std::string& model, const std::string& seed_text, double period_guess,
                    const std::string& anchor_text, const std::string& out_dir, bool quiet) {
  const auto& info = models::info(model);
  const VectorField field = models::make(model);
  const std::vector<double> seed = seed_text.empty() ? info.default_seed : parse_list(seed_text);
  if (seed.size() != field.dimension()) throw Error(ErrorKind::ConfigError, "--seed has the wrong dimension");
  const double guess = period_guess > 0.0 ? period_guess : info.period_guess;
  if (!(guess > 0.0)) throw Error(ErrorKind::ConfigError, "model has no period guess; pass --period-guess");

  LimitCycle cycle = find_limit_cycle(field, to_vec(seed), guess);
  if (!anchor_text.empty()) {
    const auto anchor = parse_list(anchor_text);
    if (anchor.size() != field.dimension()) throw Error(ErrorKind::ConfigError, "--anchor has the wrong dimension");
    cycle = cycle.anchored_near(to_vec(anchor)).first;
  }
  const FloquetData floquet = monodromy(cycle);
  double normalization_error = std::numeric_limits<double>::quiet_NaN();
  try {
    const AdjointCycle z = adjoint_cycle(cycle);
    normalization_error = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double t = cycle.period() * k / 100.0;
      normalization_error = std::max(normalization_error, std::abs(z.at(t).dot(cycle.velocity_at(t)) - 1.0));
    }
  } catch (const Error&) {
    // Degenerate multiplier: no adjoint; reported as nan.
  }

  nlohmann::json j;
  j["model"] = model;
  j["period"] = cycle.period();
  j["closure"] = cycle.closure();
  j["anchor"] = std::vector<double>(cycle.anchor().data(), cycle.anchor().data() + cycle.anchor().size());
  nlohmann::json mult = nlohmann::json::array();
  for (const auto& m : floquet.multipliers) mult.push_back({{"re", m.real()}, {"im", m.imag()}, {"abs", std::abs(m)}});
  j["multipliers"] = mult;
  j["adjoint_normalization_error"] = finite_or_string(normalization_error);
  if (!out_dir.empty()) write_text(fs::path(out_dir) / "limit_cycle.json", j.dump(2) + "\n");

  if (!quiet) {
    std::cout << "model:   " << model << "\n"
              << "period:  " << format_double(cycle.period()) << "\n"
              << "anchor:  ";
    for (Eigen::Index i = 0; i < cycle.anchor().size(); ++i) {
      std::cout << (i ? ", " : "") << format_double(cycle.anchor()[i]);
    }
    std::cout << "\nclosure: " << format_double(cycle.closure()) << "\nmultipliers:\n";
    for (const auto& m : floquet.multipliers) {
      std::cout << "  " << format_double(m.real()) << (m.imag() < 0 ? " - " : " + ") << format_double(std::abs(m.imag()))
                << "i  |" << format_double(std::abs(m)) << "|\n";
    }
    std::cout << "adjoint normalization error: " << format_double(normalization_error) << "\n";
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synclab: master-slave synchronization experiments"};
  app.require_subcommand(1);

  std::string cfg;
  std::string out_dir;
  std::uint64_t rng_seed = 0;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--out", out_dir, "output directory");
    if (with_seed) sub->add_option("--seed", rng_seed, "random seed (overrides the config)");
    sub->add_flag("--quiet", quiet, "suppress progress output");
  };

  CLI::App* run = app.add_subcommand("run", "run a scenario; exit 0 pass, 1 threshold failure, 2 config error, 3 simulation failure");
  run->add_option("config", cfg, "scenario file")->required();
  add_common(run, true);

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid and print or write sweep.csv");
  sweep->add_option("config", cfg, "sweep file")->required();
  add_common(sweep, true);

  CLI::App* cert = app.add_subcommand("certify", "gain certificate of a static scenario");
  cert->add_option("config", cfg, "scenario file")->required();
  add_common(cert, true);

  std::string model;
  std::string state_seed;
  std::string anchor;
  double period_guess = 0.0;
  CLI::App* lc = app.add_subcommand("limit-cycle", "find a limit cycle with its Floquet data");
  lc->add_option("model", model, "catalog model name")->required();
  lc->add_option("--seed", state_seed, "initial state, comma separated");
  lc->add_option("--period-guess", period_guess, "rough period");
  lc->add_option("--anchor", anchor, "re-anchor the orbit at the point nearest to this state");
  add_common(lc, false);

  CLI::App* list = app.add_subcommand("models", "list catalog models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  const std::optional<std::uint64_t> seed =
      (run->count("--seed") || sweep->count("--seed") || cert->count("--seed")) ? std::optional(rng_seed) : std::nullopt;
  try {
    if (*run) return cmd_run(cfg, out_dir, seed, quiet);
    if (*sweep) return cmd_sweep(cfg, out_dir, seed, quiet);
    if (*cert) return cmd_certify(cfg, out_dir, seed, quiet);
    if (*lc) return cmd_limit_cycle(model, state_seed, period_guess, anchor, out_dir, quiet);
    if (*list) {
      for (const auto& m : models::catalog()) std::cout << m.name << "\t" << m.description << "\n";
      return kExitPass;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSimulationFailure;
  }
  return kExitPass;
}
