#pragma once

#include <cstdint>
#include <random>

namespace svcharme {

/// SplitMix64 finalizer. A bijection on 64-bit words.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Child seed number `index` of `parent`. Distinct indices give distinct
/// children for a fixed parent, because the input map is injective and
/// splitmix64 is a bijection.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return splitmix64(parent + (index + 1) * 0xD1B54A32D192ED03ULL);
}

using Engine = std::mt19937_64;

/// Uniform draw on [0, 1) from the top 53 bits of one engine output.
[[nodiscard]] inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// The three decorrelated substreams behind one trajectory: hidden regime
/// transitions, the volatility innovation and the skew innovation.
struct StreamSet {
  Engine regime;
  Engine eps;
  Engine iota;

  [[nodiscard]] static StreamSet from_seed(std::uint64_t seed) {
    return StreamSet{Engine(derive_seed(seed, 0)), Engine(derive_seed(seed, 1)),
                     Engine(derive_seed(seed, 2))};
  }
};

}  // namespace svcharme
