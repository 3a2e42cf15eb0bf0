#pragma once

#include <vector>

#include "chl/estimators.hpp"

namespace chl::detail {

/// Dense training design: features and targets in the fitted space.
struct Design {
  std::vector<Reflectances> x;
  std::vector<double> y;
};

/// Validates a training table (non-empty, canonical bands, labelled, finite
/// features, positive targets for log10) and extracts its design.
Design make_design(const SampleTable& train, TargetSpace target);

double to_target_space(double chl, TargetSpace target);
double from_target_space(double value, TargetSpace target) noexcept;

}  // namespace chl::detail
