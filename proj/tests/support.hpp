#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "svcharme/density.hpp"
#include "svcharme/ergodicity.hpp"
#include "svcharme/markov_core.hpp"
#include "svcharme/model.hpp"
#include "svcharme/serialization.hpp"
#include "svcharme/simulator.hpp"

namespace svcharme::testing {

inline RegimeFunctions affine_regime(double slope, double sigma = 1.0, double skew = 0.1) {
  return RegimeFunctions{RegimeFunction::affine(0.0, slope), RegimeFunction::constant(sigma),
                         RegimeFunction::constant(skew)};
}

inline ModelSpec single_regime(const RegimeFunctions& r, InnovationSpec eps = InnovationSpec::standard_normal(),
                               InnovationSpec iota = InnovationSpec::standard_normal()) {
  return ModelSpec::create(TransitionMatrix::validate({{1.0}}), {r}, eps, iota);
}

/// Two regimes, tm [[0.9,0.1],[0.2,0.8]], mean slopes 0.3 and 1.1, sigma 1,
/// A 0.1, Gaussian innovations. Assumption 8 limsups 0.202 and 0.986.
inline ModelSpec reference_spec() {
  return ModelSpec::create(TransitionMatrix::validate({{0.9, 0.1}, {0.2, 0.8}}),
                           {affine_regime(0.3), affine_regime(1.1)}, InnovationSpec::standard_normal(),
                           InnovationSpec::standard_normal());
}

/// Mean slope 1.2 in both regimes; limsup 1.44.
inline ModelSpec explosive_spec() {
  return ModelSpec::create(TransitionMatrix::validate({{0.9, 0.1}, {0.2, 0.8}}),
                           {affine_regime(1.2), affine_regime(1.2)}, InnovationSpec::standard_normal(),
                           InnovationSpec::standard_normal());
}

/// K = 1 with m(x) = sqrt(0.98) x and A at the floor; limsup 0.98.
inline ModelSpec near_critical_spec() { return single_regime(affine_regime(std::sqrt(0.98), 1.0, 1e-12)); }

/// K = 1, m = 0, sigma = 1, A at the floor: X_t is iid N(0, 1).
inline ModelSpec iid_spec() { return single_regime(affine_regime(0.0, 1.0, 1e-12)); }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("svcharme_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// JSON text of the reference config with the given extra blocks.
inline Json reference_config_json() {
  return Json{{"model", to_json(reference_spec())}};
}

}  // namespace svcharme::testing
