#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chl {

inline constexpr std::size_t kNumBands = 6;

/// Wavelength labels (nm) of the six reflectance bands, in feature order.
inline constexpr std::array<std::string_view, kNumBands> kBandLabels = {
    "412", "443", "490", "510", "555", "670"};

/// Label of the chlorophyll-a plane inside a grid stack.
inline constexpr std::string_view kChlLabel = "chl";

/// Feature index of a wavelength label, or nullopt if unknown.
std::optional<std::size_t> band_index(std::string_view label) noexcept;

/// CSV column name of a band feature, e.g. "rrs_443".
std::string feature_name(std::size_t band);

using Reflectances = std::array<double, kNumBands>;

/// One pixel: six remote-sensing reflectances and, for labelled pixels,
/// the chlorophyll-a concentration in mg/m^3.
struct Sample {
  Reflectances rrs{};
  std::optional<double> chl;

  bool operator==(const Sample&) const = default;
};

/// True when every band is finite and > 0 and chl (when present) is finite
/// and > 0. This is the admission rule for training and testing.
bool is_valid_sample(const Sample& s) noexcept;

struct SampleTable {
  std::vector<Sample> rows;
  std::vector<std::string> band_names = default_band_names();

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }

  /// Targets of every row. Throws SchemaError if any row lacks chl.
  std::vector<double> targets() const;

  bool all_labelled() const noexcept;

  static std::vector<std::string> default_band_names();

  bool operator==(const SampleTable&) const = default;
};

/// Throws SchemaError unless the band names are the canonical six.
void require_canonical_bands(const SampleTable& table);

/// Georeferenced raster plane. Row 0 is the northernmost row; columns run
/// west to east. Values equal to fill_value mark missing data.
struct GeoGrid {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  double lat_north = 0.0;
  double lat_south = 0.0;
  double lon_west = 0.0;
  double lon_east = 0.0;
  std::vector<double> values;
  double fill_value = kDefaultFill;

  static constexpr double kDefaultFill = -999.0;

  /// Filled grid of the given geometry.
  static GeoGrid filled(std::size_t rows, std::size_t cols, double lat_north,
                        double lat_south, double lon_west, double lon_east,
                        double fill_value = kDefaultFill);

  std::size_t size() const noexcept { return values.size(); }
  double& at(std::size_t r, std::size_t c) { return values[r * n_cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }

  bool is_fill(double v) const noexcept;
  /// Non-fill and finite.
  bool is_present(std::size_t i) const noexcept;

  /// Latitude/longitude of a cell centre (linear indexing).
  double cell_lat(std::size_t r) const noexcept;
  double cell_lon(std::size_t c) const noexcept;

  /// Same shape and georeferencing (values and fill ignored).
  bool same_geometry(const GeoGrid& other) const noexcept;

  /// Throws DimensionError when an invariant is violated.
  void validate() const;

  bool operator==(const GeoGrid&) const = default;
};

/// Reflectance planes keyed by wavelength label plus an optional chl plane.
struct GridStack {
  std::map<std::string, GeoGrid> bands;
  std::optional<GeoGrid> chl;
  std::optional<std::string> time_start;
  std::optional<std::string> time_end;

  /// Any member grid, used as the geometry reference. Throws SchemaError on
  /// an empty stack.
  const GeoGrid& reference() const;

  /// Throws SchemaError if any of the six reflectance bands is missing.
  void require_all_bands() const;

  /// Throws DimensionError if member grids disagree in geometry.
  void validate() const;

  bool operator==(const GridStack&) const = default;
};

struct PixelIndex {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const PixelIndex&) const = default;
};

struct FlattenedStack {
  SampleTable table;
  /// Grid position of each table row.
  std::vector<PixelIndex> pixels;
};

/// One row per pixel whose six bands (and chl, when the stack has a chl
/// plane) are non-fill, finite and positive; row-major north-to-south scan.
FlattenedStack flatten_grid_stack(const GridStack& stack);

struct TrainTestSplit {
  SampleTable train;
  SampleTable test;
  std::uint64_t seed = 0;
  double train_frac = 0.0;
  double test_frac = 0.0;
  /// Source row indices of the train and test members.
  std::vector<std::size_t> train_index;
  std::vector<std::size_t> test_index;
};

/// Seeded Fisher-Yates shuffle of the valid rows, then the first
/// floor(train_frac*N) rows become train and the next floor(test_frac*N)
/// rows test. Rows failing is_valid_sample are not counted in N.
TrainTestSplit split_train_test(const SampleTable& table, double train_frac,
                                double test_frac, std::uint64_t seed);

struct ColumnStats {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  bool operator==(const ColumnStats&) const = default;
};

/// Population statistics of the six feature columns.
struct TableStats {
  std::vector<std::string> band_names = SampleTable::default_band_names();
  std::array<ColumnStats, kNumBands> features{};
  bool operator==(const TableStats&) const = default;
};

TableStats table_stats(const SampleTable& table);

/// Population statistics of a single column of values.
ColumnStats column_stats(std::span<const double> values);

/// (x - mean) / sd per feature; columns with sd == 0 map to 0. Targets are
/// copied unchanged.
SampleTable standardize(const SampleTable& table, const TableStats& stats);
Reflectances standardize(const Reflectances& rrs, const TableStats& stats) noexcept;

}  // namespace chl
