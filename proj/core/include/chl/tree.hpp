#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "chl/types.hpp"

namespace chl {

class Rng;

/// Feature matrix and targets a tree is grown on. Rows are addressed by
/// index; bootstrap resamples repeat indices.
struct TrainingView {
  std::span<const Reflectances> x;
  std::span<const double> y;
};

struct TreeParams {
  /// nullopt means unlimited depth.
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_split = 2;

  bool operator==(const TreeParams&) const = default;
};

/// Flat node record. Internal nodes route x[feature] <= threshold left.
struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // leaf prediction; 0 on internal nodes

  bool is_leaf() const noexcept { return feature == kLeaf; }
  bool operator==(const TreeNode&) const = default;
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double predict(const Reflectances& x) const noexcept;

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const noexcept;
  std::size_t depth() const noexcept;

  /// Throws FormatError if child links are out of range or cyclic.
  void validate() const;

  bool operator==(const Tree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  /// Variance reduction N*Var(parent) - N_L*Var(left) - N_R*Var(right).
  double impurity_decrease = 0.0;
};

/// A split must reduce the parent sum of squares by more than this fraction
/// of it; smaller decreases are rounding noise and the node becomes a leaf.
inline constexpr double kMinRelativeDecrease = 1e-12;

/// Candidate decreases closer than this fraction of the parent sum of
/// squares are ties, resolved by lowest (feature, threshold).
inline constexpr double kSplitTieTolerance = 1e-12;

/// Midpoint of two consecutive distinct sorted values, nudged down to `lo`
/// if rounding would place it on `hi`.
double split_midpoint(double lo, double hi) noexcept;

/// Exhaustive CART split search over the given features. Candidates are the
/// midpoints between consecutive distinct values; the maximal variance
/// reduction wins, ties (see kSplitTieTolerance) going to the lowest feature index and then the
/// lowest threshold. Returns nullopt when no candidate reduces impurity or
/// the node holds fewer than min_samples_split rows.
std::optional<SplitCandidate> find_best_split(const TrainingView& data,
                                              std::span<const std::size_t> rows,
                                              std::span<const std::size_t> features,
                                              std::size_t min_samples_split);

/// Extra-trees split: one uniform threshold in (min, max) per feature, best
/// pair by variance reduction. Constant features are skipped.
std::optional<SplitCandidate> find_random_split(const TrainingView& data,
                                                std::span<const std::size_t> rows,
                                                std::span<const std::size_t> features,
                                                std::size_t min_samples_split, Rng& rng);

enum class SplitStrategy { best, random };

struct TreeBuildConfig {
  TreeParams params;
  /// Features examined per node; kNumBands examines all of them.
  std::size_t max_features = kNumBands;
  SplitStrategy strategy = SplitStrategy::best;
};

/// Grows a regression tree on `rows` (indices into data, repeats allowed).
/// `rng` is required when max_features < kNumBands or strategy is random.
Tree build_tree(const TrainingView& data, std::vector<std::size_t> rows,
                const TreeBuildConfig& config, Rng* rng);

}  // namespace chl
