#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "chl/baseline.hpp"
#include "chl/evaluation.hpp"
#include "chl/types.hpp"

namespace chl {

/// Forward model used to build a desk-scale labelled dataset.
///
/// R is drawn uniformly in [-0.3, 1.0]. The 555 nm band is fixed at 0.005;
/// one ratio band carries rrs555 * 10^R (443 for R >= 0.45, 490 for
/// 0.15 <= R < 0.45, 510 below), the other two ratio bands sit at 0.45 of
/// rrs555, 412 at 0.40 and 670 at 0.08 of rrs555. The label is the
/// band-ratio chlorophyll of these noiseless bands; multiplicative
/// log-normal noise exp(noise * z) is then applied to every band.
struct SyntheticConfig {
  std::size_t n = 50000;
  double noise = 0.02;
  std::uint64_t seed = 7;
  BandRatioCoeffs coeffs = BandRatioCoeffs::canonical();
  double train_frac = 0.5;
  double test_frac = 0.2;
};

inline constexpr double kSyntheticR555 = 0.005;
inline constexpr double kSyntheticRMin = -0.3;
inline constexpr double kSyntheticRMax = 1.0;

/// Draws config.n labelled samples. Throws ArgumentError if n < 1000 or
/// noise < 0.
SampleTable generate_synthetic(const SyntheticConfig& config);

struct SyntheticBenchmark {
  SampleTable data;
  TrainTestSplit split;
  ComparisonResult comparison;
  /// Band-ratio baseline scored on the test table.
  double baseline_mae = 0.0;
  double baseline_accuracy = 0.0;
  /// Estimators whose fit raised RankError (e.g. linear when noise = 0
  /// leaves constant bands), as (name, message).
  std::vector<std::pair<std::string, std::string>> skipped;
};

/// Generates the dataset, splits it with the config's seed and fractions,
/// scores the baseline and compares the eight default estimators. Rank
/// failures are recorded in `skipped`; other errors propagate.
SyntheticBenchmark run_synthetic_benchmark(const SyntheticConfig& config,
                                           const FitOptions& options = {});

/// The eight estimators with their documented defaults, all seeded with `seed`.
std::vector<EstimatorSpec> default_specs(std::uint64_t seed = kDefaultSeed);

}  // namespace chl
