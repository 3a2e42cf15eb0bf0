#pragma once

#include <cstdint>
#include <random>

namespace chl {

/// Portable pseudo-random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are not portable, so every derived
/// draw (bounded integers, uniform reals, normals) is computed here from raw
/// 64-bit engine outputs. Identical seeds give identical streams on every
/// conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). Rejection sampling, so unbiased. n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform double in the open interval (0, 1).
  double uniform_open01();

  /// Standard normal draw (Box-Muller, one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for sub-stream `index` of a run seeded with `seed` (for example, one
/// stream per ensemble member). Depends only on (seed, index).
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace chl
