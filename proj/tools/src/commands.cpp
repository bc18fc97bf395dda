#include "commands.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

#include "svcharme/errors.hpp"
#include "svcharme/innovation.hpp"
#include "svcharme/markov_core.hpp"
#include "svcharme/parallel.hpp"
#include "svcharme/simulator.hpp"

#ifndef SVCHARME_VERSION
#define SVCHARME_VERSION "0.0.0"
#endif

namespace svcharme::cli {

namespace {

constexpr double kStandardizationTolerance = 1e-6;

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json error_json(const Error& e) { return Json{{"error", to_string(e.code())}, {"message", e.what()}}; }

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw OutputError("cannot create output directory " + dir.string());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

Json with_seed(Json doc, const char* block, const std::optional<std::uint64_t>& seed) {
  if (seed && doc.is_object()) {
    if (!doc.contains(block)) doc[block] = Json::object();
    if (doc[block].is_object()) doc[block]["seed"] = *seed;
  }
  return doc;
}

Json manifest(const char* command, const RunConfig& config, const CommandOptions& options, Json seeds,
              const std::vector<std::string>& outputs) {
  Json j{{"tool", "svcharme"},
         {"version", version()},
         {"command", command},
         {"config_hash", hex64(fnv1a64(config.source.dump()))},
         {"config", config.source},
         {"seeds", std::move(seeds)},
         {"forced", options.force},
         {"outputs", outputs}};
  return j;
}

void write_manifest(const CommandOptions& options, const char* command, const Json& j) {
  write_json(options.out_dir / (std::string(command) + "_manifest.json"), j);
}

std::size_t resolve_threads(std::size_t threads) {
  if (threads != 0) return threads;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

bool refuse_unchecked(const RunConfig& config, const CommandOptions& options, const char* command, std::ostream& out,
                      bool& check_passed) {
  const CheckOutcome check = evaluate_checks(config);
  check_passed = check.pass;
  if (check.pass) return false;
  if (options.force) {
    out << command << ": config fails check (" << join(check.failures) << "); continuing under --force\n";
    return false;
  }
  out << command << ": config fails check (" << join(check.failures) << "); rerun with --force to proceed\n";
  return true;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

/// (A^t)_{lk} > 0.
bool reachable(const TransitionMatrix& tm, Regime l, Regime k, int steps) {
  if (steps == 1) return tm(l.index(), k.index()) > 0.0;
  for (std::size_t j = 0; j < tm.size(); ++j) {
    if (tm(l.index(), j) > 0.0 && tm(j, k.index()) > 0.0) return true;
  }
  return false;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::config_error:
    case ErrorCode::grid_too_small:
    case ErrorCode::too_few_batches:
    case ErrorCode::invalid_parameter:
    case ErrorCode::regime_out_of_range:
    case ErrorCode::invalid_init:
      return kExitUsage;
    default:
      return kExitFailed;
  }
}

}  // namespace

const char* version() noexcept { return SVCHARME_VERSION; }

CheckOutcome evaluate_checks(const RunConfig& config) {
  const ModelSpec& spec = config.model;
  CheckOutcome outcome;
  Json& report = outcome.report;
  Json errors = Json::array();
  Json checks = Json::object();
  const auto record = [&](const char* name, bool ok) {
    checks[name] = ok;
    if (!ok) outcome.failures.emplace_back(name);
  };

  const TransitionMatrix& tm = spec.transition();
  const bool irreducible = is_irreducible(tm);
  const std::size_t d = period(tm);
  Json chain{{"irreducible", irreducible}, {"period", d}, {"aperiodic", d == 1}};
  try {
    const StationaryDistribution pi = stationary_distribution(tm);
    chain["stationary_distribution"] = pi.probabilities;
    chain["balance_residual"] = pi.balance_residual(tm);
  } catch (const Error& e) {
    chain["stationary_distribution"] = nullptr;
    chain["error"] = to_string(e.code());
  }
  report["chain"] = chain;
  record("irreducible", irreducible);
  record("aperiodic", d == 1);

  const auto standardized = [](const InnovationMoments& m) {
    return std::abs(m.mean) <= kStandardizationTolerance && std::abs(m.variance - 1.0) <= kStandardizationTolerance;
  };
  Json innovations = Json::object();
  try {
    const InnovationMoments m = innovation_mean_variance(spec.eps());
    innovations["eps"] = to_json(m);
    record("eps_standardized", standardized(m));
  } catch (const Error& e) {
    innovations["eps"] = error_json(e);
    errors.push_back(to_string(e.code()));
    record("eps_standardized", false);
  }
  try {
    const InnovationMoments m = innovation_moments(spec.iota());
    innovations["iota"] = to_json(m);
    record("iota_standardized", standardized(m));
    record("iota_fourth_moment", std::isfinite(m.kappa));
  } catch (const Error& e) {
    innovations["iota"] = error_json(e);
    errors.push_back(to_string(e.code()));
    record("iota_fourth_moment", false);
  }
  innovations["eps"]["spec"] = to_json(spec.eps());
  innovations["iota"]["spec"] = to_json(spec.iota());
  report["innovations"] = innovations;

  try {
    const DriftReport drift = check_assumption8(spec, config.check.grid, config.check.margin);
    report["assumption8"] = to_json(drift);
    record("drift", drift.pass);
  } catch (const Error& e) {
    if (exit_code_for(e.code()) == kExitUsage) throw;
    report["assumption8"] = error_json(e);
    if (std::find(errors.begin(), errors.end(), to_string(e.code())) == errors.end()) errors.push_back(to_string(e.code()));
    record("drift", false);
  }

  outcome.pass = outcome.failures.empty();
  report["checks"] = checks;
  report["errors"] = errors;
  report["pass"] = outcome.pass;
  return outcome;
}

int cmd_check(const Json& doc, const CommandOptions& options, std::ostream& out) {
  const RunConfig config = parse_run_config(doc);
  ensure_dir(options.out_dir);
  CheckOutcome outcome = evaluate_checks(config);
  write_json(options.out_dir / "check_report.json", outcome.report);
  write_manifest(options, "check", manifest("check", config, options, Json::object(), {"check_report.json"}));
  if (outcome.pass) {
    out << "check: pass (max limsup " << outcome.report["assumption8"]["max_limsup"].get<double>() << ")\n";
    return kExitOk;
  }
  out << "check: fail (" << join(outcome.failures) << ")";
  for (const auto& e : outcome.report["errors"]) out << " " << e.get<std::string>();
  out << "\n";
  return kExitFailed;
}

int cmd_simulate(const Json& doc, const CommandOptions& options, std::ostream& out) {
  const RunConfig config = parse_run_config(with_seed(doc, "simulate", options.seed));
  ensure_dir(options.out_dir);
  bool check_passed = false;
  if (refuse_unchecked(config, options, "simulate", out, check_passed)) return kExitFailed;

  const SimulateConfig& sim = config.simulate;
  std::vector<double> pi;
  if (!sim.init_regime) pi = stationary_distribution(config.model.transition()).probabilities;

  struct Meta {
    std::uint64_t seed = 0;
    std::size_t init_regime = 0;
    std::size_t length = 0;
    bool diverged = false;
    std::optional<std::size_t> diverged_at;
  };
  std::vector<Meta> metas(sim.replications);
  const auto file_name = [](std::size_t r) { return "path_r" + std::to_string(r) + ".csv"; };
  parallel_for(sim.replications, resolve_threads(options.threads), [&](std::size_t r) {
    const std::uint64_t seed = replication_seed(sim.seed, r);
    const Regime init = sim.init_regime ? *sim.init_regime : stationary_initial_regime(pi, seed);
    const Path path = simulate_path(config.model, init, sim.init_x, sim.n, seed);
    write_file(options.out_dir / file_name(r), path_csv(path));
    metas[r] = Meta{seed, init.label(), path.size(), path.diverged, path.diverged_at};
  });

  Json replications = Json::array();
  std::vector<std::string> outputs;
  std::size_t diverged = 0;
  for (std::size_t r = 0; r < metas.size(); ++r) {
    const Meta& m = metas[r];
    diverged += m.diverged ? 1 : 0;
    outputs.push_back(file_name(r));
    replications.push_back(Json{{"index", r},
                                {"seed", m.seed},
                                {"file", file_name(r)},
                                {"init_regime", m.init_regime},
                                {"length", m.length},
                                {"diverged", m.diverged},
                                {"diverged_at", m.diverged_at ? Json(*m.diverged_at) : Json(nullptr)}});
  }
  Json j = manifest("simulate", config, options, Json{{"master", sim.seed}, {"derivation", "derive_seed(master, r)"}},
                    outputs);
  j["check_passed"] = check_passed;
  j["replications"] = replications;
  j["diverged_count"] = diverged;
  write_manifest(options, "simulate", j);
  out << "simulate: " << sim.replications << " replications of length " << sim.n << ", " << diverged << " diverged\n";
  return diverged == sim.replications ? kExitFailed : kExitOk;
}

int cmd_density(const Json& doc, const CommandOptions& options, std::ostream& out) {
  const RunConfig config = parse_run_config(doc);
  if (!config.density) throw ConfigError("/density", "missing required block");
  const DensityConfig& dc = *config.density;
  ensure_dir(options.out_dir);
  const std::size_t threads = resolve_threads(options.threads);

  const DensityCurve curve =
      density_curve(config.model, dc.regime, dc.x, linspace(dc.u_min, dc.u_max, dc.points), dc.quadrature, threads);
  write_file(options.out_dir / "density.csv", density_csv(curve));
  std::vector<std::string> outputs{"density.csv"};
  out << "density: regime " << dc.regime.label() << ", x " << dc.x << ", normalization "
      << format_double(curve.normalization) << "\n";

  int status = kExitOk;
  if (dc.small_set) {
    const SmallSetConfig& sc = *dc.small_set;
    const TransitionMatrix& tm = config.model.transition();
    Json entries = Json::array();
    bool all_pass = true;
    for (const int t : sc.steps) {
      for (std::size_t l = 1; l <= tm.size(); ++l) {
        for (std::size_t k = 1; k <= tm.size(); ++k) {
          SmallSetQuery q;
          q.from = Regime(l);
          q.to = Regime(k);
          q.radius = sc.radius;
          q.target_lo = sc.target_lo;
          q.target_hi = sc.target_hi;
          q.steps = t;
          q.grid_points = sc.grid_points;
          const SmallSetReport r = small_set_lower_bound(config.model, q, dc.quadrature, threads);
          const bool can_reach = reachable(tm, q.from, q.to, t);
          const bool ok = can_reach ? r.pass : r.minimum == 0.0;
          all_pass = all_pass && ok;
          Json e = to_json(r);
          e["reachable"] = can_reach;
          e["consistent"] = ok;
          entries.push_back(std::move(e));
        }
      }
    }
    write_json(options.out_dir / "small_set_report.json", Json{{"entries", entries}, {"pass", all_pass}});
    outputs.emplace_back("small_set_report.json");
    out << "small set: " << (all_pass ? "positive on every reachable pair" : "fail") << "\n";
    if (!all_pass) status = kExitFailed;
  }
  write_manifest(options, "density", manifest("density", config, options, Json::object(), outputs));
  return status;
}

int cmd_diagnose(const Json& doc, const CommandOptions& options, std::ostream& out) {
  const RunConfig config = parse_run_config(with_seed(doc, "diagnose", options.seed));
  ensure_dir(options.out_dir);
  bool check_passed = false;
  if (refuse_unchecked(config, options, "diagnose", out, check_passed)) return kExitFailed;

  DiagnoseOptions opts = config.diagnose;
  opts.decay.threads = resolve_threads(options.threads);
  const DriftReport drift = check_assumption8(config.model, config.check.grid, config.check.margin);
  const DiagnosticsReport report = run_diagnostics(config.model, opts);

  const ConvergenceReport& conv = report.convergence;
  Json j{{"drift_constants", to_json(report.drift)},
         {"convergence", to_json(conv)},
         {"assumption8", to_json(drift)},
         {"notes", report.notes}};
  write_json(options.out_dir / "diagnose_report.json", j);
  write_file(options.out_dir / "distance_decay.csv", distance_csv(conv));
  write_file(options.out_dir / "drift_constants.csv", drift_constants_csv(report.drift));
  write_file(options.out_dir / "drift_ratio.csv", drift_ratio_csv(drift));
  write_file(options.out_dir / "mcse.csv", mcse_csv(conv));
  Json m = manifest("diagnose", config, options, Json{{"master", opts.decay.master_seed}},
                    {"diagnose_report.json", "distance_decay.csv", "drift_constants.csv", "drift_ratio.csv", "mcse.csv"});
  m["check_passed"] = check_passed;
  write_manifest(options, "diagnose", m);

  out << "diagnose: beta " << report.drift.beta << ", L " << report.drift.L;
  if (conv.fitted_rho) out << ", rho " << *conv.fitted_rho << ", R^2 " << *conv.fit_r_squared;
  out << "\n";
  for (const std::string& note : report.notes) out << "note: " << note << "\n";
  if (conv.fitted_rho && !(*conv.fitted_rho < 1.0)) return kExitFailed;
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and ergodicity diagnostics for regime-switching skewed SV models", "svcharme"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  app.fallthrough();
  CommandOptions options;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  app.add_option("--out", out_dir, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Override the master seed of simulate or diagnose");
  app.add_option("--threads", options.threads, "Worker threads; 0 uses every core")->capture_default_str();

  std::string config_path;
  const auto add = [&](const char* name, const char* help, bool forceable) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "Config or manifest file")->required();
    if (forceable) sub->add_flag("--force", options.force, "Run even when the config fails check");
    return sub;
  };
  CLI::App* check = add("check", "Check Assumptions 1-8 and write check_report.json", false);
  CLI::App* simulate = add("simulate", "Simulate paths; refuses configs failing check", true);
  CLI::App* density = add("density", "Evaluate the one-step transition density", false);
  CLI::App* diagnose = add("diagnose", "Drift constants and convergence diagnostics", true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  options.out_dir = out_dir;
  if (seed_opt->count() > 0) options.seed = seed;

  try {
    Json doc = load_json_file(config_path);
    if (is_manifest(doc)) {
      if (doc.contains("forced") && doc["forced"].is_boolean() && doc["forced"].get<bool>()) options.force = true;
      doc = Json(doc.at("config"));
    }
    if (check->parsed()) return cmd_check(doc, options, out);
    if (simulate->parsed()) return cmd_simulate(doc, options, out);
    if (density->parsed()) return cmd_density(doc, options, out);
    if (diagnose->parsed()) return cmd_diagnose(doc, options, out);
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "svcharme: " << e.what() << "\n";
    return kExitUsage;
  } catch (const OutputError& e) {
    err << "svcharme: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "svcharme: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "svcharme: " << e.what() << "\n";
    return kExitFailed;
  } catch (...) {
    err << "svcharme: unknown failure\n";
    return kExitFailed;
  }
}

}  // namespace svcharme::cli
