#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "chl/types.hpp"

namespace chl {

struct Neighbor {
  double dist2 = 0.0;
  std::size_t index = 0;

  /// Order by distance, then by lower training-row index.
  friend bool operator<(const Neighbor& a, const Neighbor& b) noexcept {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
  }
  bool operator==(const Neighbor&) const = default;
};

double squared_distance(const Reflectances& a, const Reflectances& b) noexcept;

/// Exact k-nearest-neighbour index over six-dimensional points.
///
/// Results equal a full sort of all squared distances under the
/// (distance, index) order, including ties at the k-th rank.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Reflectances> points);

  /// The k nearest points sorted by (dist2, index). k must be <= size().
  std::vector<Neighbor> nearest(const Reflectances& query, std::size_t k) const;

  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Reflectances>& points() const noexcept { return points_; }

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::size_t axis = 0;
    double split = 0.0;
    Reflectances lo{};
    Reflectances hi{};
  };

  std::int32_t build(std::size_t begin, std::size_t end);
  void search(std::int32_t node, const Reflectances& q, std::size_t k,
              std::vector<Neighbor>& heap) const;

  static constexpr std::size_t kLeafSize = 16;

  std::vector<Reflectances> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace chl
