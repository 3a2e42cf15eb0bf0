#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chl/estimators.hpp"
#include "chl/types.hpp"

namespace chl {

/// Mean absolute error. Throws ArgumentError on empty or mismatched input.
double mae(std::span<const double> pred, std::span<const double> truth);

/// Coefficient of determination as a percentage:
///   100 * (1 - SS_res / SS_tot).
/// May be negative. Throws ArgumentError for fewer than 2 values or
/// mismatched lengths and DomainError when truth is constant.
double r2_accuracy(std::span<const double> pred, std::span<const double> truth);

struct ReportRow {
  std::string name;
  double mae = 0.0;
  double accuracy = 0.0;
  std::size_t n_test = 0;

  bool operator==(const ReportRow&) const = default;
};

struct EvaluationReport {
  std::vector<ReportRow> rows;
  std::uint64_t split_seed = 0;
  double train_frac = 0.0;
  double test_frac = 0.0;
  std::string dataset_id;

  /// `model,mae,accuracy,n_test` with one line per row.
  std::string to_csv() const;
  /// Column-aligned text table.
  std::string to_text() const;
};

struct ComparisonResult {
  EvaluationReport report;
  /// Test-set predictions per spec, in spec order.
  std::vector<std::vector<double>> predictions;
};

/// Fits every spec on split.train and scores it on split.test. Rows follow
/// the spec order; a failing fit is rethrown with the model name attached.
ComparisonResult compare_models(std::span<const EstimatorSpec> specs, const TrainTestSplit& split,
                                const FitOptions& options = {});

/// Silverman's rule: 0.9 * min(sd, IQR / 1.34) * N^(-1/5), with population
/// sd and linearly interpolated quartiles. Falls back to sd when the IQR is
/// zero. Throws DomainError for N < 2 or constant data.
double silverman_bandwidth(std::span<const double> values);

/// Linear-interpolation quantile (the usual "type 7" definition) of data
/// that need not be sorted; q in [0, 1].
double quantile(std::span<const double> values, double q);

struct DensityCurve {
  std::vector<double> xs;
  std::vector<double> ys;
  double bandwidth = 0.0;
  std::size_t n = 0;

  /// `x,density` CSV.
  std::string to_csv() const;
};

/// Gaussian kernel density estimate evaluated at xs (sorted ascending).
DensityCurve kde_density(std::span<const double> values, double bandwidth,
                         std::span<const double> xs);

/// `count` evenly spaced points on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t count);

struct Composite {
  GeoGrid mean;
  /// Number of non-fill contributions per pixel.
  std::vector<std::size_t> counts;
};

/// Per-pixel mean over the grids where the pixel is present. Pixels absent
/// from every grid are fill. Throws DimensionError on geometry mismatch.
Composite composite_average(std::span<const GeoGrid> grids);

/// Pixels whose relative error is reported must have truth at least this.
inline constexpr double kRelativeErrorFloor = 1e-6;

/// Signed (pred - truth) / truth where both are present and
/// truth >= kRelativeErrorFloor; fill elsewhere.
GeoGrid relative_error_grid(const GeoGrid& pred, const GeoGrid& truth);

enum class MapScale { log10, linear };

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Colour for fill pixels (mid grey, not on the ramp).
inline constexpr Rgb kFillColor{128, 128, 128};

/// Viridis ramp sampled at 11 evenly spaced anchors and linearly
/// interpolated; t is clamped to [0, 1].
Rgb ramp_color(double t) noexcept;

/// Binary PPM (P6, maxval 255). Values are clamped to [lo, hi] and mapped
/// to the ramp linearly or in log10; fill and non-finite pixels get
/// kFillColor. Throws ArgumentError unless lo < hi (and lo > 0 for log10).
std::string render_map(const GeoGrid& grid, double lo, double hi, MapScale scale);

}  // namespace chl
