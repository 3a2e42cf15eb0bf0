#include "chl/knn.hpp"

#include <algorithm>
#include <numeric>

#include "chl/error.hpp"

namespace chl {

double squared_distance(const Reflectances& a, const Reflectances& b) noexcept {
  double d2 = 0.0;
  for (std::size_t j = 0; j < kNumBands; ++j) d2 += (a[j] - b[j]) * (a[j] - b[j]);
  return d2;
}

KdTree::KdTree(std::vector<Reflectances> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!points_.empty()) build(0, points_.size());
}

std::int32_t KdTree::build(std::size_t begin, std::size_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({});
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo = points_[order_[begin]];
  node.hi = node.lo;
  for (std::size_t i = begin; i < end; ++i) {
    const Reflectances& p = points_[order_[i]];
    for (std::size_t j = 0; j < kNumBands; ++j) {
      node.lo[j] = std::min(node.lo[j], p[j]);
      node.hi[j] = std::max(node.hi[j], p[j]);
    }
  }
  if (end - begin > kLeafSize) {
    std::size_t axis = 0;
    for (std::size_t j = 1; j < kNumBands; ++j) {
      if (node.hi[j] - node.lo[j] > node.hi[axis] - node.lo[axis]) axis = j;
    }
    if (node.hi[axis] > node.lo[axis]) {
      const std::size_t mid = begin + (end - begin) / 2;
      std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                       order_.begin() + static_cast<std::ptrdiff_t>(mid),
                       order_.begin() + static_cast<std::ptrdiff_t>(end),
                       [&](std::size_t a, std::size_t b) {
                         return points_[a][axis] < points_[b][axis] ||
                                (points_[a][axis] == points_[b][axis] && a < b);
                       });
      node.axis = axis;
      node.split = points_[order_[mid]][axis];
      node.left = build(begin, mid);
      node.right = build(mid, end);
    }
  }
  nodes_[static_cast<std::size_t>(id)] = node;
  return id;
}

namespace {

// Squared distance from q to the node's bounding box; a lower bound for
// every point inside it.
double box_distance(const Reflectances& q, const Reflectances& lo, const Reflectances& hi) {
  double d2 = 0.0;
  for (std::size_t j = 0; j < kNumBands; ++j) {
    double d = 0.0;
    if (q[j] < lo[j]) {
      d = lo[j] - q[j];
    } else if (q[j] > hi[j]) {
      d = q[j] - hi[j];
    }
    d2 += d * d;
  }
  return d2;
}

}  // namespace

void KdTree::search(std::int32_t id, const Reflectances& q, std::size_t k,
                    std::vector<Neighbor>& heap) const {
  const Node& node = nodes_[static_cast<std::size_t>(id)];
  // A box whose lower bound equals the current k-th distance may still hold
  // a tie with a lower index, so only strictly farther boxes are pruned.
  if (heap.size() == k && box_distance(q, node.lo, node.hi) > heap.front().dist2) return;
  if (node.left < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t idx = order_[i];
      const Neighbor cand{squared_distance(q, points_[idx]), idx};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
      } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  const bool left_first = q[node.axis] <= node.split;
  search(left_first ? node.left : node.right, q, k, heap);
  search(left_first ? node.right : node.left, q, k, heap);
}

std::vector<Neighbor> KdTree::nearest(const Reflectances& query, std::size_t k) const {
  if (k == 0) throw ArgumentError("k must be >= 1");
  if (k > points_.size()) {
    throw ArgumentError("k = " + std::to_string(k) + " exceeds the " +
                        std::to_string(points_.size()) + " stored rows");
  }
  std::vector<Neighbor> heap;
  heap.reserve(k);
  search(0, query, k, heap);
  std::sort_heap(heap.begin(), heap.end());
  return heap;
}

}  // namespace chl
