#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "chl/types.hpp"

namespace chl {

/// Fourth-order band-ratio polynomial:
///   chl = 10^(a0 + a1 R + a2 R^2 + a3 R^3 + a4 R^4),
///   R = log10(max_n rrs(n) / rrs(denominator)).
struct BandRatioCoeffs {
  std::array<double, 5> a{};
  /// Numerator band indices into the six-band feature order.
  std::vector<std::size_t> numerator_bands;
  std::size_t denominator_band = 0;

  /// Throws ArgumentError on an empty or overlapping band set.
  void validate() const;

  /// OC4V4 as printed in the source publication (cubic term 6.049).
  static BandRatioCoeffs paper();
  /// OC4V4 with the published operational cubic term 0.649.
  static BandRatioCoeffs canonical();

  /// Parses {"a": [5 numbers], "numerator": [443, 490, 510], "denominator": 555}.
  static BandRatioCoeffs from_json(std::string_view text);
  std::string to_json() const;

  bool operator==(const BandRatioCoeffs&) const = default;
};

/// log10 of the largest numerator/denominator ratio. Throws DomainError if a
/// referenced band is not finite and positive.
double max_band_ratio(const Reflectances& rrs, const BandRatioCoeffs& coeffs);
double max_band_ratio(const Sample& sample, const BandRatioCoeffs& coeffs);

/// Polynomial in R evaluated by Horner's scheme; returns mg/m^3.
double polynomial_chl(double r, const BandRatioCoeffs& coeffs) noexcept;

/// max_band_ratio followed by polynomial_chl.
double band_ratio_chl(const Reflectances& rrs, const BandRatioCoeffs& coeffs);

/// Per-pixel band-ratio chlorophyll. Pixels with a fill, non-finite or
/// non-positive referenced band become fill.
GeoGrid baseline_grid(const GridStack& stack, const BandRatioCoeffs& coeffs);

}  // namespace chl
