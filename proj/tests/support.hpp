#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "chl/random.hpp"
#include "chl/types.hpp"

namespace chl::test {

/// Rounds to float precision, as a grid round trip does.
inline double f32(double v) { return static_cast<double>(static_cast<float>(v)); }

/// Labelled table with bands uniform in [lo, hi) and targets from `f`.
template <class F>
SampleTable random_table(std::size_t n, std::uint64_t seed, F f, double lo = 0.001,
                         double hi = 0.02) {
  Rng rng(seed);
  SampleTable t;
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    for (double& v : s.rrs) v = lo + (hi - lo) * rng.uniform01();
    s.chl = f(s.rrs, rng);
    t.rows.push_back(s);
  }
  return t;
}

inline SampleTable random_table(std::size_t n, std::uint64_t seed) {
  return random_table(n, seed, [](const Reflectances&, Rng& r) { return 0.1 + 5.0 * r.uniform01(); });
}

inline GeoGrid grid_like(std::size_t rows, std::size_t cols, double value = 0.0) {
  GeoGrid g = GeoGrid::filled(rows, cols, 30.0, 6.0, -34.0, -8.0);
  for (double& v : g.values) v = value;
  return g;
}

/// Stack of six reflectance planes with random positive values.
inline GridStack random_stack(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  GridStack s;
  for (auto label : kBandLabels) {
    GeoGrid g = grid_like(rows, cols);
    for (double& v : g.values) v = f32(0.001 + 0.02 * rng.uniform01());
    s.bands[std::string(label)] = g;
  }
  return s;
}

// Applies one random corruption: byte flips, truncation, insertion or a
// header-length rewrite.
inline std::string mutate(std::string s, Rng& rng) {
  switch (rng.uniform_index(5)) {
    case 0: {
      const auto flips = 1 + rng.uniform_index(8);
      for (std::uint64_t i = 0; i < flips && !s.empty(); ++i) {
        s[rng.uniform_index(s.size())] = static_cast<char>(rng.uniform_index(256));
      }
      break;
    }
    case 1:
      s.resize(rng.uniform_index(s.size() + 1));
      break;
    case 2:
      s.insert(rng.uniform_index(s.size() + 1), std::string(1 + rng.uniform_index(16),
                                                            static_cast<char>(rng.uniform_index(256))));
      break;
    case 3:
      if (s.size() >= 12) {
        const auto v = static_cast<std::uint32_t>(rng.next_u64());
        std::memcpy(s.data() + 8, &v, 4);
      }
      break;
    default:
      if (!s.empty()) s.erase(rng.uniform_index(s.size()), 1 + rng.uniform_index(32));
      break;
  }
  return s;
}

}  // namespace chl::test
