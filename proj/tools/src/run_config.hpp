#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "svcharme/density.hpp"
#include "svcharme/ergodicity.hpp"
#include "svcharme/model.hpp"
#include "svcharme/quadrature.hpp"
#include "svcharme/serialization.hpp"

namespace svcharme::cli {

struct SimulateConfig {
  std::size_t n = 1000;
  std::size_t replications = 1;
  /// Empty means Q_1 is drawn from the stationary law of the chain.
  std::optional<Regime> init_regime;
  double init_x = 0.0;
  std::uint64_t seed = 1;
};

struct CheckConfig {
  MagnitudeGrid grid = MagnitudeGrid::standard();
  double margin = kDriftMargin;
};

struct SmallSetConfig {
  double radius = 2.0;
  double target_lo = -1.0;
  double target_hi = 1.0;
  std::vector<int> steps{1, 2};
  std::size_t grid_points = 41;
};

struct DensityConfig {
  Regime regime;
  double x = 0.0;
  double u_min = -6.0;
  double u_max = 12.0;
  std::size_t points = 181;
  QuadratureSpec quadrature;
  std::optional<SmallSetConfig> small_set;
};

struct RunConfig {
  RunConfig(Json source_doc, ModelSpec spec) : source(std::move(source_doc)), model(std::move(spec)) {}

  /// Effective configuration document, as recorded in manifests.
  Json source;
  ModelSpec model;
  SimulateConfig simulate;
  CheckConfig check;
  std::optional<DensityConfig> density;
  DiagnoseOptions diagnose;
};

/// True for documents written as run manifests; their "config" member is the
/// configuration to replay.
[[nodiscard]] bool is_manifest(const Json& doc);

/// Reads and parses a JSON file. Throws ConfigError.
[[nodiscard]] Json load_json_file(const std::filesystem::path& path);

/// Validates every block of a configuration document. Throws ConfigError
/// with the JSON pointer of the offending field.
[[nodiscard]] RunConfig parse_run_config(const Json& doc);

}  // namespace svcharme::cli
