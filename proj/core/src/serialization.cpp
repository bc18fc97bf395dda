#include "svcharme/serialization.hpp"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "svcharme/errors.hpp"

namespace svcharme {

namespace {

std::string child(const std::string& pointer, const std::string& key) { return pointer + "/" + key; }
std::string child(const std::string& pointer, std::size_t index) { return pointer + "/" + std::to_string(index); }

const Json& require(const Json& j, const std::string& pointer, const char* key) {
  if (!j.is_object()) throw ConfigError(pointer, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(child(pointer, key), "missing required field");
  return *it;
}

double number_at(const Json& j, const std::string& pointer) {
  if (!j.is_number()) throw ConfigError(pointer, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(pointer, "expected a finite number");
  return v;
}

double require_number(const Json& j, const std::string& pointer, const char* key) {
  return number_at(require(j, pointer, key), child(pointer, key));
}

std::string require_string(const Json& j, const std::string& pointer, const char* key) {
  const Json& v = require(j, pointer, key);
  if (!v.is_string()) throw ConfigError(child(pointer, key), "expected a string");
  return v.get<std::string>();
}

Json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

Json json_vector(const std::vector<double>& values) {
  Json out = Json::array();
  for (const double v : values) out.push_back(json_number(v));
  return out;
}

}  // namespace

Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // Translate the byte offset to line and column.
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column), e.what());
  }
}

InnovationSpec innovation_from_json(const Json& j, const std::string& pointer) {
  const std::string family = require_string(j, pointer, "family");
  if (family == "standard_normal" || family == "normal") return InnovationSpec::standard_normal();
  if (family == "laplace") return InnovationSpec::laplace();
  if (family == "student_t") {
    const double dof = require_number(j, pointer, "dof");
    try {
      return InnovationSpec::student_t(dof);
    } catch (const Error& e) {
      throw ConfigError(child(pointer, "dof"), e.what());
    }
  }
  throw ConfigError(child(pointer, "family"), "unknown innovation family '" + family + "'");
}

Json to_json(const InnovationSpec& inn) {
  Json j{{"family", to_string(inn.family())}};
  if (inn.family() == InnovationFamily::student_t) j["dof"] = inn.dof();
  return j;
}

RegimeFunction function_from_json(const Json& j, const std::string& pointer) {
  const std::string family = require_string(j, pointer, "family");
  if (family == "constant") return RegimeFunction::constant(require_number(j, pointer, "value"));
  if (family == "affine") {
    return RegimeFunction::affine(require_number(j, pointer, "intercept"), require_number(j, pointer, "slope"));
  }
  if (family == "saturating") {
    return RegimeFunction::saturating(require_number(j, pointer, "scale"), require_number(j, pointer, "offset"));
  }
  throw ConfigError(child(pointer, "family"), "unknown function family '" + family + "'");
}

Json to_json(const RegimeFunction& f) {
  switch (f.family()) {
    case FunctionFamily::constant: return Json{{"family", "constant"}, {"value", f.first()}};
    case FunctionFamily::affine:
      return Json{{"family", "affine"}, {"intercept", f.first()}, {"slope", f.second()}};
    case FunctionFamily::saturating:
      return Json{{"family", "saturating"}, {"scale", f.second()}, {"offset", f.first()}};
  }
  return Json{};
}

ModelSpec model_from_json(const Json& j, const std::string& pointer) {
  const std::string tm_pointer = child(pointer, "transition_matrix");
  const Json& tm_json = require(j, pointer, "transition_matrix");
  if (!tm_json.is_array()) throw ConfigError(tm_pointer, "expected an array of rows");
  std::vector<std::vector<double>> raw;
  for (std::size_t i = 0; i < tm_json.size(); ++i) {
    const Json& row = tm_json[i];
    if (!row.is_array()) throw ConfigError(child(tm_pointer, i), "expected an array of numbers");
    std::vector<double> values;
    for (std::size_t c = 0; c < row.size(); ++c) values.push_back(number_at(row[c], child(child(tm_pointer, i), c)));
    raw.push_back(std::move(values));
  }
  std::optional<TransitionMatrix> tm;
  try {
    tm = TransitionMatrix::validate(raw);
  } catch (const NonStochasticRow& e) {
    throw ConfigError(child(tm_pointer, e.row()), e.what());
  } catch (const NegativeEntry& e) {
    throw ConfigError(child(child(tm_pointer, e.row()), e.col()), e.what());
  } catch (const Error& e) {
    throw ConfigError(tm_pointer, e.what());
  }

  const std::string regimes_pointer = child(pointer, "regimes");
  const Json& regimes_json = require(j, pointer, "regimes");
  if (!regimes_json.is_array()) throw ConfigError(regimes_pointer, "expected an array of regimes");
  std::vector<RegimeFunctions> regimes;
  for (std::size_t k = 0; k < regimes_json.size(); ++k) {
    const std::string rp = child(regimes_pointer, k);
    const Json& r = regimes_json[k];
    RegimeFunctions f;
    f.mean = function_from_json(require(r, rp, "mean"), child(rp, "mean"));
    f.volatility = function_from_json(require(r, rp, "volatility"), child(rp, "volatility"));
    f.skew = function_from_json(require(r, rp, "skew"), child(rp, "skew"));
    regimes.push_back(f);
  }
  const InnovationSpec eps = innovation_from_json(require(j, pointer, "eps"), child(pointer, "eps"));
  const InnovationSpec iota = innovation_from_json(require(j, pointer, "iota"), child(pointer, "iota"));
  try {
    return ModelSpec::create(std::move(*tm), std::move(regimes), eps, iota);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(regimes_pointer, e.what());
  }
}

Json to_json(const ModelSpec& spec) {
  Json regimes = Json::array();
  for (const RegimeFunctions& r : spec.regimes()) {
    regimes.push_back(Json{{"mean", to_json(r.mean)}, {"volatility", to_json(r.volatility)}, {"skew", to_json(r.skew)}});
  }
  return Json{{"transition_matrix", spec.transition().rows()},
              {"regimes", regimes},
              {"eps", to_json(spec.eps())},
              {"iota", to_json(spec.iota())}};
}

Json to_json(const InnovationMoments& m) {
  return Json{{"mean", json_number(m.mean)}, {"variance", json_number(m.variance)}, {"kappa", json_number(m.kappa)}};
}

Json to_json(const DriftReport& report) {
  Json rows = Json::array();
  for (const DriftRow& row : report.rows) rows.push_back(Json{{"x", row.x}, {"ratios", json_vector(row.ratios)}});
  Json j{{"per_regime_limsup", json_vector(report.per_regime_limsup)},
         {"max_limsup", json_number(report.max_limsup)},
         {"analytic_limsup", report.analytic_limsup ? json_vector(*report.analytic_limsup) : Json(nullptr)},
         {"analytic_max_limsup", report.analytic_max_limsup ? Json(*report.analytic_max_limsup) : Json(nullptr)},
         {"analytic_agrees", report.analytic_agrees},
         {"grid", json_vector(report.grid)},
         {"rows", rows},
         {"margin", report.margin},
         {"verdict", report.pass ? "pass" : "fail"}};
  j["L"] = report.L ? Json(*report.L) : Json(nullptr);
  j["beta"] = report.beta ? Json(*report.beta) : Json(nullptr);
  return j;
}

Json to_json(const DriftConstants& constants) {
  Json rows = Json::array();
  for (const DriftConstantsRow& row : constants.rows) {
    rows.push_back(Json{{"x", row.x}, {"relative_drift", json_vector(row.relative_drift)}});
  }
  return Json{{"L", constants.L}, {"beta", constants.beta}, {"slack", constants.slack}, {"rows", rows}};
}

Json to_json(const AutocovFit& fit) {
  return Json{{"rate", json_number(fit.rate)},
              {"r_squared", json_number(fit.r_squared)},
              {"informative", fit.informative},
              {"lags_used", fit.lags_used},
              {"autocorrelation", json_vector(fit.autocorrelation)}};
}

Json to_json(const ConvergenceReport& report) {
  Json mcse = Json::array();
  for (const McseRow& row : report.mcse_table) {
    mcse.push_back(Json{{"n", row.n}, {"mean", json_number(row.mean)}, {"mcse", json_number(row.mcse)},
                        {"mcse_sqrt_n", json_number(row.scaled)}});
  }
  Json by_start = Json::array();
  for (const auto& d : report.distances_by_start) by_start.push_back(json_vector(d));
  const auto optional_number = [](const std::optional<double>& v) { return v ? json_number(*v) : Json(nullptr); };
  return Json{{"lags", report.lags},
              {"distances", json_vector(report.distances)},
              {"distances_by_start", by_start},
              {"informative", report.informative},
              {"noise_floor", report.noise_floor},
              {"already_stationary", report.already_stationary},
              {"fitted_log_C", optional_number(report.fitted_log_c)},
              {"fitted_rho", optional_number(report.fitted_rho)},
              {"fit_r_squared", optional_number(report.fit_r_squared)},
              {"reference_half_distance", report.reference_half_distance},
              {"reference_stationary", report.reference_stationary},
              {"autocov", report.autocov ? to_json(*report.autocov) : Json(nullptr)},
              {"mcse_table", mcse}};
}

Json to_json(const SmallSetReport& report) {
  return Json{{"from", report.query.from.label()},
              {"to", report.query.to.label()},
              {"radius", report.query.radius},
              {"target", {report.query.target_lo, report.query.target_hi}},
              {"steps", report.query.steps},
              {"grid_points", report.query.grid_points},
              {"minimum", report.minimum},
              {"argmin", report.argmin},
              {"pass", report.pass},
              {"warnings", report.warnings},
              {"xs", json_vector(report.xs)},
              {"probabilities", json_vector(report.probabilities)}};
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

std::string path_csv(const Path& path) {
  std::string out = "t,regime,x\n";
  out.reserve(out.size() + path.size() * 32);
  for (std::size_t t = 0; t < path.size(); ++t) {
    out += std::to_string(t + 1);
    out += ',';
    out += std::to_string(path.regimes.states[t].label());
    out += ',';
    out += format_double(path.values[t]);
    out += '\n';
  }
  return out;
}

std::string density_csv(const DensityCurve& curve) {
  std::string out = "# regime=" + std::to_string(curve.regime.label()) + " x=" + format_double(curve.x) +
                    " normalization=" + format_double(curve.normalization) + "\n";
  out += "u,density,fbar\n";
  for (std::size_t i = 0; i < curve.u.size(); ++i) {
    out += format_double(curve.u[i]) + "," + format_double(curve.density[i]) + "," + format_double(curve.fbar[i]) +
           "\n";
  }
  return out;
}

std::string distance_csv(const ConvergenceReport& report) {
  std::string out = "lag,distance,informative\n";
  for (std::size_t i = 0; i < report.lags.size(); ++i) {
    out += std::to_string(report.lags[i]) + "," + format_double(report.distances[i]) + "," +
           (report.informative[i] ? "1" : "0") + "\n";
  }
  return out;
}

std::string drift_ratio_csv(const DriftReport& report) {
  std::string out = "x";
  const std::size_t k = report.per_regime_limsup.size();
  for (std::size_t i = 0; i < k; ++i) out += ",ratio_" + std::to_string(i + 1);
  out += '\n';
  for (const DriftRow& row : report.rows) {
    out += format_double(row.x);
    for (const double r : row.ratios) out += "," + format_double(r);
    out += '\n';
  }
  return out;
}

std::string drift_constants_csv(const DriftConstants& constants) {
  std::string out = "x";
  const std::size_t k = constants.rows.empty() ? 0 : constants.rows.front().relative_drift.size();
  for (std::size_t i = 0; i < k; ++i) out += ",drift_" + std::to_string(i + 1);
  out += '\n';
  for (const DriftConstantsRow& row : constants.rows) {
    out += format_double(row.x);
    for (const double d : row.relative_drift) out += "," + format_double(d);
    out += '\n';
  }
  return out;
}

std::string mcse_csv(const ConvergenceReport& report) {
  std::string out = "n,mean,mcse,mcse_sqrt_n\n";
  for (const McseRow& row : report.mcse_table) {
    out += std::to_string(row.n) + "," + format_double(row.mean) + "," + format_double(row.mcse) + "," +
           format_double(row.scaled) + "\n";
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view data) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : data) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016" PRIx64, value);
  return buffer;
}

}  // namespace svcharme
