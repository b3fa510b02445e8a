#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace emg {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Per-run seed: mix64(mix64(master) ^ (run_index * golden ratio)).
constexpr std::uint64_t derive_seed(std::uint64_t master_seed,
                                    std::uint64_t run_index) noexcept {
  return mix64(mix64(master_seed) ^ (run_index * 0x9E3779B97F4A7C15ULL));
}

/// Thin wrapper over mt19937_64. The double conversion is done by hand so
/// trajectories are bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// +1 or -1 with probability 1/2 each.
  int sign() { return (engine_() >> 63) ? 1 : -1; }

  /// Fills `out` with uniforms on [0, 1) of 32-bit resolution, two per
  /// engine output (high half first).
  void fill_uniform32(std::span<double> out) {
    const std::size_t n = out.size();
    std::size_t i = 0;
    for (; i + 1 < n; i += 2) {
      const std::uint64_t w = engine_();
      out[i] = static_cast<double>(w >> 32) * 0x1.0p-32;
      out[i + 1] = static_cast<double>(w & 0xFFFFFFFFULL) * 0x1.0p-32;
    }
    if (i < n) out[i] = static_cast<double>(engine_() >> 32) * 0x1.0p-32;
  }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace emg
