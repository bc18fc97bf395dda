#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string_view>

#include "svcharme/errors.hpp"

namespace svcharme::cli {

namespace {

/// Typed reads from one JSON object, with pointers in every error.
class Block {
 public:
  Block(const Json& j, std::string pointer) : j_(j), pointer_(std::move(pointer)) {
    if (!j_.is_object()) throw ConfigError(pointer_.empty() ? "/" : pointer_, "expected an object");
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& [key, value] : j_.items()) {
      bool known = false;
      for (const std::string_view k : keys) known = known || key == k;
      if (!known) throw ConfigError(at(key), "unknown field");
    }
  }

  [[nodiscard]] bool has(const char* key) const { return j_.contains(key); }
  [[nodiscard]] const Json& get(const char* key) const {
    if (!has(key)) throw ConfigError(at(key), "missing required field");
    return j_.at(key);
  }
  [[nodiscard]] std::string at(std::string_view key) const { return pointer_ + "/" + std::string(key); }

  [[nodiscard]] double number(const char* key) const { return number_value(get(key), at(key)); }
  [[nodiscard]] double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  [[nodiscard]] std::uint64_t uint(const char* key) const { return uint_value(get(key), at(key)); }
  [[nodiscard]] std::uint64_t uint(const char* key, std::uint64_t fallback) const {
    return has(key) ? uint(key) : fallback;
  }

  [[nodiscard]] bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!get(key).is_boolean()) throw ConfigError(at(key), "expected true or false");
    return get(key).get<bool>();
  }

  [[nodiscard]] std::vector<double> numbers(const char* key) const {
    const Json& v = get(key);
    if (!v.is_array() || v.empty()) throw ConfigError(at(key), "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number_value(v[i], at(key) + "/" + std::to_string(i)));
    return out;
  }

  [[nodiscard]] std::vector<std::uint64_t> uints(const char* key) const {
    const Json& v = get(key);
    if (!v.is_array() || v.empty()) throw ConfigError(at(key), "expected a non-empty array of integers");
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(uint_value(v[i], at(key) + "/" + std::to_string(i)));
    return out;
  }

  [[nodiscard]] const Json& json() const noexcept { return j_; }

  static double number_value(const Json& v, const std::string& pointer) {
    if (!v.is_number()) throw ConfigError(pointer, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(pointer, "expected a finite number");
    return d;
  }

  static std::uint64_t uint_value(const Json& v, const std::string& pointer) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) throw ConfigError(pointer, "expected a non-negative integer");
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d < 1.8e19 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(pointer, "expected a non-negative integer");
  }

 private:
  const Json& j_;
  std::string pointer_;
};

std::size_t positive_size(const Block& b, const char* key, std::size_t fallback) {
  const std::uint64_t v = b.uint(key, fallback);
  if (v == 0) throw ConfigError(b.at(key), "must be positive");
  return static_cast<std::size_t>(v);
}

Regime regime_value(const Json& v, const std::string& pointer, std::size_t k) {
  const std::uint64_t r = Block::uint_value(v, pointer);
  if (r < 1 || r > k) {
    throw ConfigError(pointer, "regime must lie in 1.." + std::to_string(k) + " (1-based)");
  }
  return Regime(static_cast<std::size_t>(r));
}

SimulateConfig parse_simulate(const Json& j, std::size_t k) {
  const Block b(j, "/simulate");
  b.allow_only({"n", "replications", "init_regime", "init_x", "seed"});
  SimulateConfig c;
  c.n = positive_size(b, "n", c.n);
  c.replications = positive_size(b, "replications", c.replications);
  if (b.has("init_regime")) {
    const Json& v = b.get("init_regime");
    if (v.is_string()) {
      if (v.get<std::string>() != "stationary") throw ConfigError(b.at("init_regime"), "expected a regime or \"stationary\"");
    } else {
      c.init_regime = regime_value(v, b.at("init_regime"), k);
    }
  }
  c.init_x = b.number("init_x", c.init_x);
  c.seed = b.uint("seed", c.seed);
  return c;
}

MagnitudeGrid parse_grid(const Json& j, const std::string& pointer) {
  const Block b(j, pointer);
  if (b.has("magnitudes")) {
    b.allow_only({"magnitudes"});
    MagnitudeGrid grid{b.numbers("magnitudes")};
    for (std::size_t i = 0; i < grid.magnitudes.size(); ++i) {
      if (!(grid.magnitudes[i] > 0.0)) throw ConfigError(b.at("magnitudes") + "/" + std::to_string(i), "must be positive");
    }
    return grid;
  }
  b.allow_only({"min_exponent", "max_exponent", "per_decade"});
  const double lo = b.number("min_exponent");
  const double hi = b.number("max_exponent");
  const std::uint64_t per = b.uint("per_decade");
  if (!(hi > lo)) throw ConfigError(b.at("max_exponent"), "must exceed min_exponent");
  if (per == 0 || per > 1000) throw ConfigError(b.at("per_decade"), "must lie in 1..1000");
  return MagnitudeGrid::decades(lo, hi, static_cast<int>(per));
}

double parse_margin(const Block& b, double fallback) {
  const double margin = b.number("margin", fallback);
  if (!(margin >= 0.0 && margin < 1.0)) throw ConfigError(b.at("margin"), "must lie in [0, 1)");
  return margin;
}

CheckConfig parse_check(const Json& j) {
  const Block b(j, "/check");
  b.allow_only({"grid", "margin"});
  CheckConfig c;
  if (b.has("grid")) c.grid = parse_grid(b.get("grid"), b.at("grid"));
  c.margin = parse_margin(b, c.margin);
  return c;
}

QuadratureSpec parse_quadrature(const Json& j, const std::string& pointer) {
  const Block b(j, pointer);
  b.allow_only({"relative_tolerance", "absolute_tolerance", "max_subdivisions"});
  QuadratureSpec q;
  q.relative_tolerance = b.number("relative_tolerance", q.relative_tolerance);
  q.absolute_tolerance = b.number("absolute_tolerance", q.absolute_tolerance);
  q.max_subdivisions = positive_size(b, "max_subdivisions", q.max_subdivisions);
  if (!(q.relative_tolerance > 0.0)) throw ConfigError(b.at("relative_tolerance"), "must be positive");
  if (!(q.absolute_tolerance >= 0.0)) throw ConfigError(b.at("absolute_tolerance"), "must be non-negative");
  return q;
}

SmallSetConfig parse_small_set(const Json& j, const std::string& pointer) {
  const Block b(j, pointer);
  b.allow_only({"radius", "target", "steps", "grid_points"});
  SmallSetConfig c;
  c.radius = b.number("radius", c.radius);
  if (!(c.radius > 0.0)) throw ConfigError(b.at("radius"), "must be positive");
  if (b.has("target")) {
    const std::vector<double> target = b.numbers("target");
    if (target.size() != 2 || target[1] < target[0]) {
      throw ConfigError(b.at("target"), "expected [lo, hi] with lo <= hi");
    }
    c.target_lo = target[0];
    c.target_hi = target[1];
  }
  if (b.has("steps")) {
    c.steps.clear();
    const std::vector<std::uint64_t> steps = b.uints("steps");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (steps[i] != 1 && steps[i] != 2) throw ConfigError(b.at("steps") + "/" + std::to_string(i), "t must be 1 or 2");
      c.steps.push_back(static_cast<int>(steps[i]));
    }
  }
  c.grid_points = positive_size(b, "grid_points", c.grid_points);
  if (c.grid_points < 2) throw ConfigError(b.at("grid_points"), "needs at least 2 points");
  return c;
}

DensityConfig parse_density(const Json& j, std::size_t k) {
  const Block b(j, "/density");
  b.allow_only({"regime", "x", "u_grid", "quadrature", "small_set"});
  DensityConfig c;
  c.regime = regime_value(b.get("regime"), b.at("regime"), k);
  c.x = b.number("x");
  if (b.has("u_grid")) {
    const Block g(b.get("u_grid"), b.at("u_grid"));
    g.allow_only({"min", "max", "points"});
    c.u_min = g.number("min", c.u_min);
    c.u_max = g.number("max", c.u_max);
    c.points = positive_size(g, "points", c.points);
    if (!(c.u_max > c.u_min)) throw ConfigError(g.at("max"), "must exceed min");
    if (c.points < 2) throw ConfigError(g.at("points"), "needs at least 2 points");
  }
  if (b.has("quadrature")) c.quadrature = parse_quadrature(b.get("quadrature"), b.at("quadrature"));
  if (b.has("small_set")) c.small_set = parse_small_set(b.get("small_set"), b.at("small_set"));
  return c;
}

DiagnoseOptions parse_diagnose(const Json& j) {
  const Block b(j, "/diagnose");
  b.allow_only({"x0", "stationary_start", "lags", "replications", "burn_in", "reference_length", "seed", "mcse_lengths",
                "batches", "autocov_max_lag", "drift_grid", "margin"});
  DiagnoseOptions o;
  if (b.has("x0")) o.decay.x0_list = b.numbers("x0");
  o.decay.stationary_start = b.boolean("stationary_start", o.decay.stationary_start);
  o.decay.max_lag = static_cast<std::size_t>(b.uint("lags", o.decay.max_lag));
  o.decay.replications = positive_size(b, "replications", o.decay.replications);
  o.decay.burn_in = static_cast<std::size_t>(b.uint("burn_in", o.decay.burn_in));
  o.decay.reference_length = positive_size(b, "reference_length", o.decay.reference_length);
  if (o.decay.reference_length < 2) throw ConfigError(b.at("reference_length"), "needs at least 2 values");
  o.decay.master_seed = b.uint("seed", o.decay.master_seed);
  if (b.has("mcse_lengths")) {
    o.mcse_lengths.clear();
    for (const std::uint64_t n : b.uints("mcse_lengths")) o.mcse_lengths.push_back(static_cast<std::size_t>(n));
  }
  o.batches = static_cast<std::size_t>(b.uint("batches", o.batches));
  if (o.batches < 20) throw ConfigError(b.at("batches"), "batch means needs at least 20 batches");
  for (std::size_t i = 0; i < o.mcse_lengths.size(); ++i) {
    if (o.mcse_lengths[i] < o.batches) {
      throw ConfigError(b.at("mcse_lengths") + "/" + std::to_string(i), "shorter than the batch count");
    }
  }
  o.autocov_max_lag = static_cast<std::size_t>(b.uint("autocov_max_lag", o.autocov_max_lag));
  if (b.has("drift_grid")) o.drift_grid = parse_grid(b.get("drift_grid"), b.at("drift_grid"));
  o.margin = parse_margin(b, o.margin);
  return o;
}

}  // namespace

bool is_manifest(const Json& doc) { return doc.is_object() && doc.contains("config") && doc.contains("config_hash"); }

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_json_text(text.str());
}

RunConfig parse_run_config(const Json& doc) {
  const Block root(doc, "");
  root.allow_only({"model", "simulate", "check", "density", "diagnose"});
  RunConfig config(doc, model_from_json(root.get("model"), "/model"));
  const std::size_t k = config.model.size();
  if (root.has("simulate")) config.simulate = parse_simulate(root.get("simulate"), k);
  if (root.has("check")) config.check = parse_check(root.get("check"));
  if (root.has("density")) config.density = parse_density(root.get("density"), k);
  if (root.has("diagnose")) config.diagnose = parse_diagnose(root.get("diagnose"));
  return config;
}

}  // namespace svcharme::cli
