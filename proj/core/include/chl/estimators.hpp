#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chl/knn.hpp"
#include "chl/svr.hpp"
#include "chl/tree.hpp"
#include "chl/types.hpp"

namespace chl {

inline constexpr std::uint64_t kDefaultSeed = 42;

enum class ModelKind { linear, ridge, tree, bagging, forest, extra_trees, svr, knn };

inline constexpr std::array<ModelKind, 8> kAllModelKinds = {
    ModelKind::linear,  ModelKind::ridge,       ModelKind::tree, ModelKind::bagging,
    ModelKind::forest,  ModelKind::extra_trees, ModelKind::svr,  ModelKind::knn};

std::string_view model_kind_name(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept;

bool is_ensemble(ModelKind kind) noexcept;

/// Space the regression target is fitted in. Predictions are always
/// returned in mg/m^3.
enum class TargetSpace { linear, log10 };

enum class Aggregation { mean, median };

struct EnsembleParams {
  std::size_t n_estimators = 100;
  std::size_t max_features = kNumBands;
  bool bootstrap = true;

  bool operator==(const EnsembleParams&) const = default;
};

struct KnnParams {
  std::size_t k = 5;
  Aggregation aggregation = Aggregation::mean;

  bool operator==(const KnnParams&) const = default;
};

/// Hyperparameters of one estimator. Only the block matching `kind` is
/// consulted; the others keep their defaults.
struct EstimatorSpec {
  ModelKind kind = ModelKind::linear;
  double lambda = 1.0;
  TreeParams tree;
  EnsembleParams ensemble;
  SvrParams svr;
  KnnParams knn;
  std::uint64_t seed = kDefaultSeed;
  TargetSpace target = TargetSpace::linear;

  /// Documented defaults per kind: forests and extra-trees draw 2 features
  /// per node, bagging uses all 6; extra-trees do not bootstrap.
  static EstimatorSpec defaults(ModelKind kind);

  /// Throws ArgumentError on out-of-range hyperparameters.
  void validate() const;

  bool operator==(const EstimatorSpec&) const = default;
};

struct LinearPayload {
  double intercept = 0.0;
  Reflectances weights{};
  bool operator==(const LinearPayload&) const = default;
};

struct EnsemblePayload {
  std::vector<Tree> trees;
  /// Per-tree bootstrap multiplicity of every training row. Empty when the
  /// ensemble was not bootstrapped or was loaded from a file.
  std::vector<std::vector<std::uint32_t>> inbag;

  bool operator==(const EnsemblePayload&) const = default;
};

struct SvrPayload {
  /// Support vectors in standardized feature space.
  std::vector<Reflectances> support_vectors;
  std::vector<double> coefficients;
  double bias = 0.0;
  double gamma = 1.0;
  bool converged = true;
  std::uint64_t iterations = 0;

  bool operator==(const SvrPayload&) const = default;
};

struct KnnPayload {
  KdTree index;
  std::vector<double> targets;
};

using ModelPayload = std::variant<LinearPayload, Tree, EnsemblePayload, SvrPayload, KnnPayload>;

struct FittedModel {
  EstimatorSpec spec;
  /// Standardization applied to inputs before evaluation (SVR, k-NN).
  std::optional<TableStats> preprocessing;
  ModelPayload payload;
};

struct FitOptions {
  /// Worker threads for ensemble construction; 0 picks the hardware count.
  /// Results do not depend on this value.
  unsigned threads = 0;
};

// Individual estimators. Each validates the relevant hyperparameters and
// requires a labelled table with the canonical bands.
FittedModel fit_ols(const SampleTable& train, TargetSpace target = TargetSpace::linear);
FittedModel fit_ridge(const SampleTable& train, double lambda,
                      TargetSpace target = TargetSpace::linear);
FittedModel fit_cart(const SampleTable& train, const TreeParams& params,
                     TargetSpace target = TargetSpace::linear);
FittedModel fit_bagging(const SampleTable& train, const EstimatorSpec& spec,
                        const FitOptions& options = {});
FittedModel fit_random_forest(const SampleTable& train, const EstimatorSpec& spec,
                              const FitOptions& options = {});
FittedModel fit_extra_trees(const SampleTable& train, const EstimatorSpec& spec,
                            const FitOptions& options = {});
FittedModel fit_svr(const SampleTable& train, const EstimatorSpec& spec);
FittedModel fit_knn(const SampleTable& train, const EstimatorSpec& spec);

/// Dispatches on spec.kind.
FittedModel fit(const EstimatorSpec& spec, const SampleTable& train,
                const FitOptions& options = {});

/// Model output in the fitted target space, before the inverse transform.
double predict_raw(const FittedModel& model, const Reflectances& rrs);

/// Predicted chl-a (mg/m^3) for one sample.
double predict_one(const FittedModel& model, const Sample& sample);

std::vector<double> predict(const FittedModel& model, const SampleTable& table);

/// Per-pixel predict_one over a stack; pixels failing the validity rule get
/// the fill value. Georeferencing is copied from the input.
GeoGrid predict_grid(const FittedModel& model, const GridStack& stack);

/// Member-tree predictions of an ensemble (fitted target space).
std::vector<double> member_predictions(const FittedModel& model, const Reflectances& rrs);

struct OobResult {
  /// nullopt when no row was out of bag for any tree.
  std::optional<double> mae;
  std::size_t covered_rows = 0;
};

/// Out-of-bag MAE (mg/m^3) of a bootstrapped ensemble on its training table.
OobResult compute_oob_mae(const FittedModel& model, const SampleTable& train);

}  // namespace chl
