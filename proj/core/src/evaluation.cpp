#include "chl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "chl/error.hpp"
#include "chl/io.hpp"

namespace chl {

double mae(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw ArgumentError("mae: length mismatch");
  if (pred.empty()) throw ArgumentError("mae: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - truth[i]);
  return sum / static_cast<double>(pred.size());
}

double r2_accuracy(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw ArgumentError("r2: length mismatch");
  if (pred.size() < 2) throw ArgumentError("r2: needs at least 2 values");
  const double mean =
      std::accumulate(truth.begin(), truth.end(), 0.0) / static_cast<double>(truth.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (!(ss_tot > 0.0)) throw DomainError("r2: truth has zero variance");
  return 100.0 * (1.0 - ss_res / ss_tot);
}

std::string EvaluationReport::to_csv() const {
  std::string out = "model,mae,accuracy,n_test\n";
  for (const auto& r : rows) {
    out += r.name + ',' + format_number(r.mae) + ',' + format_number(r.accuracy) + ',' +
           std::to_string(r.n_test) + '\n';
  }
  return out;
}

std::string EvaluationReport::to_text() const {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-*s  %12s  %12s  %8s\n", static_cast<int>(width), "model",
                "mae(mg/m3)", "accuracy(%)", "n_test");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-*s  %12.4f  %12.2f  %8zu\n", static_cast<int>(width),
                  r.name.c_str(), r.mae, r.accuracy, r.n_test);
    out += line;
  }
  return out;
}

ComparisonResult compare_models(std::span<const EstimatorSpec> specs, const TrainTestSplit& split,
                                const FitOptions& options) {
  if (split.train.empty() || split.test.empty()) {
    throw ArgumentError("comparison needs non-empty train and test tables");
  }
  const std::vector<double> truth = split.test.targets();
  ComparisonResult result;
  result.report.split_seed = split.seed;
  result.report.train_frac = split.train_frac;
  result.report.test_frac = split.test_frac;
  for (const EstimatorSpec& spec : specs) {
    const std::string name(model_kind_name(spec.kind));
    try {
      const FittedModel model = fit(spec, split.train, options);
      std::vector<double> pred = predict(model, split.test);
      ReportRow row{name, mae(pred, truth), 0.0, truth.size()};
      row.accuracy = truth.size() >= 2 ? r2_accuracy(pred, truth) : 0.0;
      result.report.rows.push_back(row);
      result.predictions.push_back(std::move(pred));
    } catch (const Error& e) {
      throw Error(e.kind(), name + ": " + e.what());
    }
  }
  return result;
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw ArgumentError("quantile of empty data");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double silverman_bandwidth(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("bandwidth needs at least 2 values");
  const ColumnStats s = column_stats(values);
  if (!(s.sd > 0.0)) throw DomainError("bandwidth of constant data is degenerate");
  const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
  const double spread = iqr > 0.0 ? std::min(s.sd, iqr / 1.34) : s.sd;
  return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

std::string DensityCurve::to_csv() const {
  std::string out = "x,density\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out += format_number(xs[i]) + ',' + format_number(ys[i]) + '\n';
  }
  return out;
}

DensityCurve kde_density(std::span<const double> values, double bandwidth,
                         std::span<const double> xs) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ArgumentError("KDE bandwidth must be finite and > 0");
  }
  if (values.empty()) throw ArgumentError("KDE of empty data");
  if (!std::is_sorted(xs.begin(), xs.end())) throw ArgumentError("KDE grid must be sorted");
  DensityCurve c;
  c.xs.assign(xs.begin(), xs.end());
  c.ys.resize(xs.size());
  c.bandwidth = bandwidth;
  c.n = values.size();
  const double norm =
      1.0 / (static_cast<double>(values.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double sum = 0.0;
    for (double v : values) {
      const double u = (xs[i] - v) / bandwidth;
      sum += std::exp(-0.5 * u * u);
    }
    c.ys[i] = norm * sum;
  }
  return c;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> xs(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) xs[i] = lo + step * static_cast<double>(i);
  xs.back() = hi;
  return xs;
}

Composite composite_average(std::span<const GeoGrid> grids) {
  if (grids.empty()) throw ArgumentError("composite of zero grids");
  const GeoGrid& ref = grids.front();
  for (const auto& g : grids) {
    g.validate();
    if (!g.same_geometry(ref)) throw DimensionError("composite grids differ in geometry");
  }
  Composite c;
  c.mean = GeoGrid::filled(ref.n_rows, ref.n_cols, ref.lat_north, ref.lat_south, ref.lon_west,
                           ref.lon_east, ref.fill_value);
  c.counts.assign(ref.size(), 0);
  // Each pixel's sum runs in a fixed order over sorted contributions so the
  // result does not depend on the order of the grid list.
  std::vector<double> contrib;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    contrib.clear();
    for (const auto& g : grids) {
      if (g.is_present(i)) contrib.push_back(g.values[i]);
    }
    if (contrib.empty()) continue;
    std::sort(contrib.begin(), contrib.end());
    const double sum = std::accumulate(contrib.begin(), contrib.end(), 0.0);
    c.counts[i] = contrib.size();
    c.mean.values[i] = sum / static_cast<double>(contrib.size());
  }
  return c;
}

GeoGrid relative_error_grid(const GeoGrid& pred, const GeoGrid& truth) {
  pred.validate();
  truth.validate();
  if (!pred.same_geometry(truth)) throw DimensionError("relative error grids differ in geometry");
  GeoGrid out = GeoGrid::filled(truth.n_rows, truth.n_cols, truth.lat_north, truth.lat_south,
                                truth.lon_west, truth.lon_east, truth.fill_value);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!pred.is_present(i) || !truth.is_present(i)) continue;
    const double t = truth.values[i];
    if (!(t >= kRelativeErrorFloor)) continue;
    out.values[i] = (pred.values[i] - t) / t;
  }
  return out;
}

}  // namespace chl
