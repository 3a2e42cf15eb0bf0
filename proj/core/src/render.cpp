#include <algorithm>
#include <array>
#include <cmath>

#include "chl/error.hpp"
#include "chl/evaluation.hpp"

namespace chl {

namespace {

// Viridis, sampled at t = 0, 0.1, ..., 1.
constexpr std::array<Rgb, 11> kViridis = {{
    {68, 1, 84},
    {72, 40, 120},
    {62, 74, 137},
    {49, 104, 142},
    {38, 130, 142},
    {31, 158, 137},
    {53, 183, 121},
    {109, 205, 89},
    {180, 222, 44},
    {223, 227, 24},
    {253, 231, 37},
}};

}  // namespace

Rgb ramp_color(double t) noexcept {
  if (!(t >= 0.0)) t = 0.0;
  if (t > 1.0) t = 1.0;
  const double pos = t * static_cast<double>(kViridis.size() - 1);
  auto idx = static_cast<std::size_t>(std::floor(pos));
  if (idx >= kViridis.size() - 1) return kViridis.back();
  const double f = pos - static_cast<double>(idx);
  auto mix = [f](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround(a + f * (static_cast<double>(b) - a)));
  };
  const Rgb& a = kViridis[idx];
  const Rgb& b = kViridis[idx + 1];
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

std::string render_map(const GeoGrid& grid, double lo, double hi, MapScale scale) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ArgumentError("map range needs finite lo < hi");
  }
  if (scale == MapScale::log10 && !(lo > 0.0)) throw ArgumentError("log10 map range needs lo > 0");
  grid.validate();

  std::string out = "P6\n" + std::to_string(grid.n_cols) + ' ' + std::to_string(grid.n_rows) +
                    "\n255\n";
  out.reserve(out.size() + grid.size() * 3);
  const double a = scale == MapScale::log10 ? std::log10(lo) : lo;
  const double b = scale == MapScale::log10 ? std::log10(hi) : hi;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Rgb c = kFillColor;
    if (grid.is_present(i)) {
      const double v = std::clamp(grid.values[i], lo, hi);
      const double s = scale == MapScale::log10 ? std::log10(v) : v;
      c = ramp_color((s - a) / (b - a));
    }
    out.push_back(static_cast<char>(c.r));
    out.push_back(static_cast<char>(c.g));
    out.push_back(static_cast<char>(c.b));
  }
  return out;
}

}  // namespace chl
