#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "svcharme/density.hpp"
#include "svcharme/ergodicity.hpp"
#include "svcharme/markov_core.hpp"
#include "svcharme/model.hpp"
#include "svcharme/simulator.hpp"

namespace svcharme {

using Json = nlohmann::json;

/// Parses structured text, reporting syntax errors as ConfigError with a
/// "line L, column C" location.
[[nodiscard]] Json parse_json_text(std::string_view text);

/// Builds a ModelSpec from its JSON form. `pointer` is the JSON pointer of `j`
/// within the enclosing document and prefixes every error location.
/// Throws ConfigError.
[[nodiscard]] ModelSpec model_from_json(const Json& j, const std::string& pointer = "/model");
[[nodiscard]] Json to_json(const ModelSpec& spec);

[[nodiscard]] InnovationSpec innovation_from_json(const Json& j, const std::string& pointer);
[[nodiscard]] Json to_json(const InnovationSpec& inn);
[[nodiscard]] RegimeFunction function_from_json(const Json& j, const std::string& pointer);
[[nodiscard]] Json to_json(const RegimeFunction& f);

[[nodiscard]] Json to_json(const InnovationMoments& m);
[[nodiscard]] Json to_json(const DriftReport& report);
[[nodiscard]] Json to_json(const DriftConstants& constants);
[[nodiscard]] Json to_json(const ConvergenceReport& report);
[[nodiscard]] Json to_json(const AutocovFit& fit);
[[nodiscard]] Json to_json(const SmallSetReport& report);

/// Shortest text that round-trips the double; "nan", "inf", "-inf"
/// for non-finite values.
[[nodiscard]] std::string format_double(double value);

/// CSV "t,regime,x" with 1-based regimes and t starting at 1.
[[nodiscard]] std::string path_csv(const Path& path);
/// CSV "u,density,fbar" preceded by a "# ..." line carrying the normalization.
[[nodiscard]] std::string density_csv(const DensityCurve& curve);
/// CSV "lag,distance,informative".
[[nodiscard]] std::string distance_csv(const ConvergenceReport& report);
/// CSV "x,ratio_1,...,ratio_K".
[[nodiscard]] std::string drift_ratio_csv(const DriftReport& report);
/// CSV "x,drift_1,...,drift_K" of relative drift.
[[nodiscard]] std::string drift_constants_csv(const DriftConstants& constants);
/// CSV "n,mean,mcse,mcse_sqrt_n" of the batch-means table.
[[nodiscard]] std::string mcse_csv(const ConvergenceReport& report);

/// 64-bit FNV-1a, used for config hashes in manifests.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view data) noexcept;
[[nodiscard]] std::string hex64(std::uint64_t value);

}  // namespace svcharme
