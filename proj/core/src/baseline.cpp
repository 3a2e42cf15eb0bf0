#include "chl/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "chl/error.hpp"

namespace chl {

namespace {

constexpr std::size_t k443 = 1;
constexpr std::size_t k490 = 2;
constexpr std::size_t k510 = 3;
constexpr std::size_t k555 = 4;

std::size_t band_from_wavelength(int nm) {
  const auto idx = band_index(std::to_string(nm));
  if (!idx) throw ArgumentError("unknown band wavelength " + std::to_string(nm));
  return *idx;
}

}  // namespace

void BandRatioCoeffs::validate() const {
  if (numerator_bands.empty()) throw ArgumentError("band ratio needs numerator bands");
  if (denominator_band >= kNumBands) throw ArgumentError("denominator band out of range");
  for (std::size_t i = 0; i < numerator_bands.size(); ++i) {
    const std::size_t b = numerator_bands[i];
    if (b >= kNumBands) throw ArgumentError("numerator band out of range");
    if (b == denominator_band) throw ArgumentError("numerator band equals the denominator");
    if (std::find(numerator_bands.begin(), numerator_bands.begin() + static_cast<std::ptrdiff_t>(i),
                  b) != numerator_bands.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw ArgumentError("duplicate numerator band");
    }
  }
  for (double c : a) {
    if (!std::isfinite(c)) throw ArgumentError("polynomial coefficients must be finite");
  }
}

BandRatioCoeffs BandRatioCoeffs::paper() {
  return {{0.366, -3.067, 1.930, 6.049, -1.532}, {k443, k490, k510}, k555};
}

BandRatioCoeffs BandRatioCoeffs::canonical() {
  return {{0.366, -3.067, 1.930, 0.649, -1.532}, {k443, k490, k510}, k555};
}

BandRatioCoeffs BandRatioCoeffs::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("coefficient file: ") + e.what());
  }
  try {
    BandRatioCoeffs c;
    const auto& a = j.at("a");
    if (!a.is_array() || a.size() != 5) throw FormatError("coefficient array must hold 5 numbers");
    for (std::size_t i = 0; i < 5; ++i) c.a[i] = a[i].get<double>();
    for (const auto& nm : j.at("numerator")) c.numerator_bands.push_back(band_from_wavelength(nm.get<int>()));
    c.denominator_band = band_from_wavelength(j.at("denominator").get<int>());
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("coefficient file: ") + e.what());
  }
}

std::string BandRatioCoeffs::to_json() const {
  nlohmann::json j;
  j["a"] = a;
  auto& num = j["numerator"] = nlohmann::json::array();
  for (auto b : numerator_bands) num.push_back(std::stoi(std::string(kBandLabels[b])));
  j["denominator"] = std::stoi(std::string(kBandLabels[denominator_band]));
  return j.dump();
}

double max_band_ratio(const Reflectances& rrs, const BandRatioCoeffs& coeffs) {
  auto checked = [&](std::size_t b) {
    const double v = rrs[b];
    if (!std::isfinite(v) || v <= 0.0) {
      throw DomainError("band " + std::string(kBandLabels[b]) + " must be finite and > 0");
    }
    return v;
  };
  const double denom = checked(coeffs.denominator_band);
  double best = 0.0;
  for (auto b : coeffs.numerator_bands) best = std::max(best, checked(b) / denom);
  return std::log10(best);
}

double max_band_ratio(const Sample& sample, const BandRatioCoeffs& coeffs) {
  return max_band_ratio(sample.rrs, coeffs);
}

double polynomial_chl(double r, const BandRatioCoeffs& coeffs) noexcept {
  const auto& a = coeffs.a;
  const double exponent = a[0] + r * (a[1] + r * (a[2] + r * (a[3] + r * a[4])));
  return std::pow(10.0, exponent);
}

double band_ratio_chl(const Reflectances& rrs, const BandRatioCoeffs& coeffs) {
  return polynomial_chl(max_band_ratio(rrs, coeffs), coeffs);
}

GeoGrid baseline_grid(const GridStack& stack, const BandRatioCoeffs& coeffs) {
  coeffs.validate();
  std::vector<std::size_t> used = coeffs.numerator_bands;
  used.push_back(coeffs.denominator_band);
  for (auto b : used) {
    if (!stack.bands.contains(std::string(kBandLabels[b]))) {
      throw SchemaError("grid stack lacks band " + std::string(kBandLabels[b]));
    }
  }
  stack.validate();
  const GeoGrid& ref = stack.bands.at(std::string(kBandLabels[coeffs.denominator_band]));
  GeoGrid out = GeoGrid::filled(ref.n_rows, ref.n_cols, ref.lat_north, ref.lat_south,
                                ref.lon_west, ref.lon_east, ref.fill_value);
  for (std::size_t i = 0; i < out.size(); ++i) {
    Reflectances rrs{};
    rrs.fill(1.0);
    bool ok = true;
    for (auto b : used) {
      const GeoGrid& g = stack.bands.at(std::string(kBandLabels[b]));
      rrs[b] = g.values[i];
      if (!g.is_present(i) || !(rrs[b] > 0.0)) ok = false;
    }
    if (ok) out.values[i] = band_ratio_chl(rrs, coeffs);
  }
  return out;
}

}  // namespace chl
