#include "chl/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chl/error.hpp"
#include "chl/random.hpp"

namespace chl {

double Tree::predict(const Reflectances& x) const noexcept {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                        : n.right);
  }
  return nodes_[i].value;
}

std::size_t Tree::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t Tree::depth() const noexcept {
  if (nodes_.empty()) return 0;
  std::size_t deepest = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
    }
  }
  return deepest;
}

void Tree::validate() const {
  if (nodes_.empty()) throw FormatError("tree has no nodes");
  // Children must point strictly forward, which rules out cycles.
  const auto n = static_cast<std::int32_t>(nodes_.size());
  for (std::int32_t i = 0; i < n; ++i) {
    const TreeNode& node = nodes_[static_cast<std::size_t>(i)];
    if (node.is_leaf()) continue;
    if (node.feature < 0 || node.feature >= static_cast<std::int32_t>(kNumBands)) {
      throw FormatError("tree node feature out of range");
    }
    if (node.left <= i || node.left >= n || node.right <= i || node.right >= n) {
      throw FormatError("tree node child link out of range");
    }
  }
}

double split_midpoint(double lo, double hi) noexcept {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

namespace {

struct NodeMoments {
  double mean = 0.0;
  double sse = 0.0;
  bool constant = true;
};

NodeMoments node_moments(const TrainingView& data, std::span<const std::size_t> rows) {
  NodeMoments m;
  const double first = data.y[rows.front()];
  double sum = 0.0;
  for (auto r : rows) {
    sum += data.y[r];
    if (data.y[r] != first) m.constant = false;
  }
  m.mean = sum / static_cast<double>(rows.size());
  for (auto r : rows) m.sse += (data.y[r] - m.mean) * (data.y[r] - m.mean);
  return m;
}

// Decrease of the sum of squares for a partition, from sums of targets
// centred on the node mean: S_L^2/n_L + S_R^2/n_R - S^2/n.
double decrease_from_sums(double left_sum, double total_sum, std::size_t n_left, std::size_t n) {
  const double right_sum = total_sum - left_sum;
  const auto nl = static_cast<double>(n_left);
  const auto nr = static_cast<double>(n - n_left);
  return left_sum * left_sum / nl + right_sum * right_sum / nr -
         total_sum * total_sum / static_cast<double>(n);
}

// Decreases within `tie` of each other are ties: the same partition reached
// through another feature sums in a different order and rounds differently.
bool better(const SplitCandidate& c, const std::optional<SplitCandidate>& best, double tie) {
  if (!best) return true;
  if (std::abs(c.impurity_decrease - best->impurity_decrease) > tie) {
    return c.impurity_decrease > best->impurity_decrease;
  }
  if (c.feature != best->feature) return c.feature < best->feature;
  return c.threshold < best->threshold;
}

}  // namespace

std::optional<SplitCandidate> find_best_split(const TrainingView& data,
                                              std::span<const std::size_t> rows,
                                              std::span<const std::size_t> features,
                                              std::size_t min_samples_split) {
  if (features.empty()) throw ArgumentError("split search needs at least one feature");
  if (rows.size() < std::max<std::size_t>(min_samples_split, 2)) return std::nullopt;
  const NodeMoments moments = node_moments(data, rows);
  if (moments.constant) return std::nullopt;

  const std::size_t n = rows.size();
  double total = 0.0;
  for (auto r : rows) total += data.y[r] - moments.mean;
  const double tie = kSplitTieTolerance * moments.sse;

  std::vector<std::size_t> sorted(rows.begin(), rows.end());
  std::optional<SplitCandidate> best;
  for (std::size_t f : features) {
    std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
      const double xa = data.x[a][f];
      const double xb = data.x[b][f];
      return xa < xb || (xa == xb && a < b);
    });
    double left = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left += data.y[sorted[i]] - moments.mean;
      const double lo = data.x[sorted[i]][f];
      const double hi = data.x[sorted[i + 1]][f];
      if (!(lo < hi)) continue;
      SplitCandidate c{f, split_midpoint(lo, hi), decrease_from_sums(left, total, i + 1, n)};
      if (better(c, best, tie)) best = c;
    }
  }
  if (!best || !(best->impurity_decrease > kMinRelativeDecrease * moments.sse)) {
    return std::nullopt;
  }
  return best;
}

std::optional<SplitCandidate> find_random_split(const TrainingView& data,
                                                std::span<const std::size_t> rows,
                                                std::span<const std::size_t> features,
                                                std::size_t min_samples_split, Rng& rng) {
  if (features.empty()) throw ArgumentError("split search needs at least one feature");
  if (rows.size() < std::max<std::size_t>(min_samples_split, 2)) return std::nullopt;
  const NodeMoments moments = node_moments(data, rows);
  if (moments.constant) return std::nullopt;

  const std::size_t n = rows.size();
  double total = 0.0;
  for (auto r : rows) total += data.y[r] - moments.mean;
  const double tie = kSplitTieTolerance * moments.sse;

  std::optional<SplitCandidate> best;
  for (std::size_t f : features) {
    double lo = data.x[rows.front()][f];
    double hi = lo;
    for (auto r : rows) {
      lo = std::min(lo, data.x[r][f]);
      hi = std::max(hi, data.x[r][f]);
    }
    if (!(lo < hi)) continue;
    double threshold = lo + rng.uniform_open01() * (hi - lo);
    if (!(threshold < hi)) threshold = lo;
    double left = 0.0;
    std::size_t n_left = 0;
    for (auto r : rows) {
      if (data.x[r][f] <= threshold) {
        left += data.y[r] - moments.mean;
        ++n_left;
      }
    }
    SplitCandidate c{f, threshold, decrease_from_sums(left, total, n_left, n)};
    if (better(c, best, tie)) best = c;
  }
  if (!best || !(best->impurity_decrease > kMinRelativeDecrease * moments.sse)) {
    return std::nullopt;
  }
  return best;
}

namespace {

bool is_constant_feature(const TrainingView& data, std::span<const std::size_t> rows,
                         std::size_t f) {
  const double first = data.x[rows.front()][f];
  return std::all_of(rows.begin(), rows.end(),
                     [&](std::size_t r) { return data.x[r][f] == first; });
}

// Visits features in random order and keeps the first `max_features` that
// are non-constant over the node, returned in ascending index order.
std::vector<std::size_t> draw_features(const TrainingView& data, std::span<const std::size_t> rows,
                                       std::size_t max_features, Rng& rng) {
  std::array<std::size_t, kNumBands> pool{};
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < kNumBands && chosen.size() < max_features; ++i) {
    const std::size_t j = i + rng.uniform_index(kNumBands - i);
    std::swap(pool[i], pool[j]);
    if (!is_constant_feature(data, rows, pool[i])) chosen.push_back(pool[i]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

struct PendingNode {
  std::size_t begin;
  std::size_t end;
  std::size_t depth;
  std::size_t slot;
};

}  // namespace

Tree build_tree(const TrainingView& data, std::vector<std::size_t> rows,
                const TreeBuildConfig& config, Rng* rng) {
  if (rows.empty()) throw ArgumentError("cannot grow a tree on zero rows");
  const bool needs_rng =
      config.max_features < kNumBands || config.strategy == SplitStrategy::random;
  if (needs_rng && rng == nullptr) throw ArgumentError("randomized tree growth needs an rng");
  if (config.max_features == 0 || config.max_features > kNumBands) {
    throw ArgumentError("max_features must be in 1..6");
  }

  std::vector<std::size_t> all_features(kNumBands);
  std::iota(all_features.begin(), all_features.end(), std::size_t{0});

  std::vector<TreeNode> nodes(1);
  // Depth-first, left subtree first; both children are allocated together.
  std::vector<PendingNode> stack{{0, rows.size(), 0, 0}};
  while (!stack.empty()) {
    const PendingNode job = stack.back();
    stack.pop_back();
    std::span<const std::size_t> node_rows(rows.data() + job.begin, job.end - job.begin);

    double sum = 0.0;
    for (auto r : node_rows) sum += data.y[r];
    TreeNode& node = nodes[job.slot];
    node.value = sum / static_cast<double>(node_rows.size());

    const bool depth_ok = !config.params.max_depth || job.depth < *config.params.max_depth;
    if (!depth_ok || node_rows.size() < config.params.min_samples_split) continue;

    std::optional<SplitCandidate> split;
    if (needs_rng) {
      const auto features = draw_features(data, node_rows, config.max_features, *rng);
      if (features.empty()) continue;
      split = config.strategy == SplitStrategy::random
                  ? find_random_split(data, node_rows, features,
                                      config.params.min_samples_split, *rng)
                  : find_best_split(data, node_rows, features, config.params.min_samples_split);
    } else {
      split = find_best_split(data, node_rows, all_features, config.params.min_samples_split);
    }
    if (!split) continue;

    auto mid_it = std::stable_partition(
        rows.begin() + static_cast<std::ptrdiff_t>(job.begin),
        rows.begin() + static_cast<std::ptrdiff_t>(job.end),
        [&](std::size_t r) { return data.x[r][split->feature] <= split->threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - rows.begin());

    const auto left_slot = nodes.size();
    nodes.resize(nodes.size() + 2);
    const auto right_slot = left_slot + 1;
    TreeNode& parent = nodes[job.slot];
    parent.feature = static_cast<std::int32_t>(split->feature);
    parent.threshold = split->threshold;
    parent.value = 0.0;  // only leaves carry a prediction
    parent.left = static_cast<std::int32_t>(left_slot);
    parent.right = static_cast<std::int32_t>(right_slot);
    stack.push_back({mid, job.end, job.depth + 1, right_slot});
    stack.push_back({job.begin, mid, job.depth + 1, left_slot});
  }
  return Tree(std::move(nodes));
}

}  // namespace chl
