#include "chl/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chl/error.hpp"
#include "chl/random.hpp"

namespace chl {

std::optional<std::size_t> band_index(std::string_view label) noexcept {
  for (std::size_t b = 0; b < kNumBands; ++b) {
    if (kBandLabels[b] == label) return b;
  }
  return std::nullopt;
}

std::string feature_name(std::size_t band) {
  return "rrs_" + std::string(kBandLabels.at(band));
}

bool is_valid_sample(const Sample& s) noexcept {
  for (double v : s.rrs) {
    if (!std::isfinite(v) || v <= 0.0) return false;
  }
  if (s.chl && (!std::isfinite(*s.chl) || *s.chl <= 0.0)) return false;
  return true;
}

std::vector<std::string> SampleTable::default_band_names() {
  return {kBandLabels.begin(), kBandLabels.end()};
}

std::vector<double> SampleTable::targets() const {
  std::vector<double> y;
  y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].chl) {
      throw SchemaError("row " + std::to_string(i) + " has no chl_a target");
    }
    y.push_back(*rows[i].chl);
  }
  return y;
}

bool SampleTable::all_labelled() const noexcept {
  return std::all_of(rows.begin(), rows.end(),
                     [](const Sample& s) { return s.chl.has_value(); });
}

void require_canonical_bands(const SampleTable& table) {
  if (table.band_names != SampleTable::default_band_names()) {
    throw SchemaError("table bands are not the canonical 412,443,490,510,555,670 set");
  }
}

GeoGrid GeoGrid::filled(std::size_t rows, std::size_t cols, double lat_north,
                        double lat_south, double lon_west, double lon_east,
                        double fill_value) {
  GeoGrid g;
  g.n_rows = rows;
  g.n_cols = cols;
  g.lat_north = lat_north;
  g.lat_south = lat_south;
  g.lon_west = lon_west;
  g.lon_east = lon_east;
  g.fill_value = fill_value;
  g.values.assign(rows * cols, fill_value);
  return g;
}

bool GeoGrid::is_fill(double v) const noexcept {
  return v == fill_value || (std::isnan(fill_value) && std::isnan(v));
}

bool GeoGrid::is_present(std::size_t i) const noexcept {
  const double v = values[i];
  return std::isfinite(v) && !is_fill(v);
}

double GeoGrid::cell_lat(std::size_t r) const noexcept {
  return lat_north - (static_cast<double>(r) + 0.5) * (lat_north - lat_south) /
                         static_cast<double>(n_rows);
}

double GeoGrid::cell_lon(std::size_t c) const noexcept {
  return lon_west + (static_cast<double>(c) + 0.5) * (lon_east - lon_west) /
                        static_cast<double>(n_cols);
}

bool GeoGrid::same_geometry(const GeoGrid& o) const noexcept {
  return n_rows == o.n_rows && n_cols == o.n_cols && lat_north == o.lat_north &&
         lat_south == o.lat_south && lon_west == o.lon_west && lon_east == o.lon_east;
}

void GeoGrid::validate() const {
  if (n_rows == 0 || n_cols == 0) throw DimensionError("grid must have positive rows and columns");
  if (!(lat_north > lat_south)) throw DimensionError("lat_north must exceed lat_south");
  if (!(lon_east > lon_west)) throw DimensionError("lon_east must exceed lon_west");
  if (values.size() != n_rows * n_cols) {
    throw DimensionError("plane holds " + std::to_string(values.size()) + " values, expected " +
                         std::to_string(n_rows * n_cols));
  }
}

const GeoGrid& GridStack::reference() const {
  if (!bands.empty()) return bands.begin()->second;
  if (chl) return *chl;
  throw SchemaError("grid stack has no planes");
}

void GridStack::require_all_bands() const {
  for (auto label : kBandLabels) {
    if (!bands.contains(std::string(label))) {
      throw SchemaError("grid stack lacks band " + std::string(label));
    }
  }
}

void GridStack::validate() const {
  const GeoGrid& ref = reference();
  ref.validate();
  for (const auto& [label, grid] : bands) {
    grid.validate();
    if (!grid.same_geometry(ref)) throw DimensionError("band " + label + " geometry differs");
  }
  if (chl) {
    chl->validate();
    if (!chl->same_geometry(ref)) throw DimensionError("chl plane geometry differs");
  }
}

FlattenedStack flatten_grid_stack(const GridStack& stack) {
  stack.require_all_bands();
  stack.validate();

  std::array<const GeoGrid*, kNumBands> planes{};
  for (std::size_t b = 0; b < kNumBands; ++b) {
    planes[b] = &stack.bands.at(std::string(kBandLabels[b]));
  }
  const GeoGrid& ref = *planes[0];
  const GeoGrid* chl = stack.chl ? &*stack.chl : nullptr;

  FlattenedStack out;
  for (std::size_t r = 0; r < ref.n_rows; ++r) {
    for (std::size_t c = 0; c < ref.n_cols; ++c) {
      const std::size_t i = r * ref.n_cols + c;
      Sample s;
      bool ok = true;
      for (std::size_t b = 0; b < kNumBands && ok; ++b) {
        ok = planes[b]->is_present(i);
        s.rrs[b] = planes[b]->values[i];
      }
      if (ok && chl) {
        ok = chl->is_present(i);
        s.chl = chl->values[i];
      }
      if (!ok || !is_valid_sample(s)) continue;
      out.table.rows.push_back(s);
      out.pixels.push_back({r, c});
    }
  }
  return out;
}

TrainTestSplit split_train_test(const SampleTable& table, double train_frac,
                                double test_frac, std::uint64_t seed) {
  auto in_unit = [](double f) { return f >= 0.0 && f <= 1.0; };
  if (!in_unit(train_frac) || !in_unit(test_frac) || train_frac + test_frac > 1.0) {
    throw ArgumentError("split fractions must lie in [0,1] and sum to at most 1");
  }
  if (!table.all_labelled()) throw ArgumentError("every row must carry chl_a to be split");

  std::vector<std::size_t> order;
  order.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (is_valid_sample(table.rows[i])) order.push_back(i);
  }

  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(order[i - 1], order[j]);
  }

  // The slack keeps decimal fractions such as 0.29 * 100 from flooring to 28.
  const auto n = static_cast<double>(order.size());
  const auto count = [n](double frac) {
    return static_cast<std::size_t>(std::floor(frac * n * (1.0 + 1e-12)));
  };
  const std::size_t n_train = count(train_frac);
  const std::size_t n_test = std::min(count(test_frac), order.size() - n_train);

  TrainTestSplit split;
  split.seed = seed;
  split.train_frac = train_frac;
  split.test_frac = test_frac;
  split.train.band_names = table.band_names;
  split.test.band_names = table.band_names;
  split.train_index.assign(order.begin(), order.begin() + n_train);
  split.test_index.assign(order.begin() + n_train, order.begin() + n_train + n_test);
  for (auto i : split.train_index) split.train.rows.push_back(table.rows[i]);
  for (auto i : split.test_index) split.test.rows.push_back(table.rows[i]);
  return split;
}

ColumnStats column_stats(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("statistics of an empty column");
  ColumnStats s;
  const auto n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / n);
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

TableStats table_stats(const SampleTable& table) {
  if (table.empty()) throw ArgumentError("statistics of an empty table");
  TableStats stats;
  stats.band_names = table.band_names;
  std::vector<double> col(table.size());
  for (std::size_t b = 0; b < kNumBands; ++b) {
    for (std::size_t i = 0; i < table.size(); ++i) col[i] = table.rows[i].rrs[b];
    stats.features[b] = column_stats(col);
  }
  return stats;
}

Reflectances standardize(const Reflectances& rrs, const TableStats& stats) noexcept {
  Reflectances z{};
  for (std::size_t b = 0; b < kNumBands; ++b) {
    const ColumnStats& c = stats.features[b];
    z[b] = c.sd > 0.0 ? (rrs[b] - c.mean) / c.sd : 0.0;
  }
  return z;
}

SampleTable standardize(const SampleTable& table, const TableStats& stats) {
  if (table.band_names != stats.band_names) {
    throw SchemaError("standardization statistics were computed for different bands");
  }
  SampleTable out;
  out.band_names = table.band_names;
  out.rows.reserve(table.size());
  for (const Sample& s : table.rows) out.rows.push_back({standardize(s.rrs, stats), s.chl});
  return out;
}

}  // namespace chl
