#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chl/estimators.hpp"

namespace chl {

inline constexpr int kModelFormatVersion = 1;

/// Serializes a fitted model as one JSON document:
///   {"format_version": 1, "model_type": ..., "hyperparams": {...},
///    "preprocessing": null | {"band_names", "mean", "sd", "min", "max"},
///    "payload": {...}}
/// Trees are nested {"feature", "threshold", "left", "right"} objects with
/// {"leaf_value"} leaves. Loading reproduces predictions bit for bit.
std::string save_model(const FittedModel& model);

/// Throws FormatError (unknown model_type, schema mismatch), VersionError
/// (format_version != 1) or ParseError (malformed JSON).
FittedModel load_model(std::string_view text);

/// Estimator spec as a flat JSON object {"model_type": kind, <hyperparams>}
/// or nested as {"model_type": kind, "hyperparams": {...}}. Missing hyperparameters take the kind's defaults; unknown keys are
/// rejected with ArgumentError.
EstimatorSpec parse_spec_json(std::string_view text);

/// A single spec object or an array of them.
std::vector<EstimatorSpec> parse_spec_list_json(std::string_view text);

std::string spec_to_json(const EstimatorSpec& spec);

}  // namespace chl
