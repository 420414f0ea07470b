#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "uforest/dataset.hpp"
#include "uforest/error.hpp"

namespace uforest {

struct Neighbor {
  double distance;
  std::size_t index;
  friend auto operator<=>(const Neighbor&, const Neighbor&) = default;
};

/// Chebyshev (max-norm) distance.
inline double chebyshev(std::span<const double> a, std::span<const double> b) noexcept {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

/// Exact nearest-neighbour index under the max-norm.
///
/// A k-d tree (median splits on the widest dimension, bounding-box pruning)
/// is used up to `kMaxTreeDim` dimensions; above that, queries scan all
/// points. Neighbours are ordered by (distance, index), so results are
/// identical between the two backends.
class KnnIndex {
 public:
  static constexpr std::size_t kMaxTreeDim = 15;
  static constexpr std::size_t kLeafSize = 16;

  explicit KnnIndex(FeatureMatrix points) : points_(std::move(points)) {
    if (points_.rows() == 0) throw InputError("KnnIndex: no points");
    perm_.resize(points_.rows());
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    if (use_tree()) build(0, perm_.size());
  }

  std::size_t size() const noexcept { return points_.rows(); }
  std::size_t dim() const noexcept { return points_.cols(); }
  bool use_tree() const noexcept { return points_.cols() <= kMaxTreeDim; }
  const FeatureMatrix& points() const noexcept { return points_; }

  /// The k nearest points to `query`, skipping index `exclude` (pass
  /// npos to keep every point). Sorted by (distance, index).
  std::vector<Neighbor> knn(std::span<const double> query, std::size_t k, std::size_t exclude = npos) const {
    check(query);
    std::priority_queue<Neighbor> heap;  // max-heap: worst kept neighbour on top
    auto offer = [&](std::size_t i) {
      if (i == exclude) return;
      const Neighbor cand{chebyshev(query, points_.row(i)), i};
      if (heap.size() < k) {
        heap.push(cand);
      } else if (cand < heap.top()) {
        heap.pop();
        heap.push(cand);
      }
    };
    if (k > 0) {
      if (use_tree()) {
        search_knn(0, query, k, heap, offer);
      } else {
        for (std::size_t i = 0; i < size(); ++i) offer(i);
      }
    }
    std::vector<Neighbor> out(heap.size());
    for (std::size_t i = out.size(); i-- > 0; heap.pop()) out[i] = heap.top();
    return out;
  }

  /// Number of points within `radius` of `query` (strictly closer when
  /// `strict`), the query point itself included if it is indexed.
  std::size_t count_within(std::span<const double> query, double radius, bool strict) const {
    check(query);
    auto inside = [&](double dist) { return strict ? dist < radius : dist <= radius; };
    if (!use_tree()) {
      std::size_t c = 0;
      for (std::size_t i = 0; i < size(); ++i) c += inside(chebyshev(query, points_.row(i)));
      return c;
    }
    std::size_t c = 0;
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
      const Node& node = nodes_[stack.back()];
      stack.pop_back();
      if (!inside(box_distance(node, query))) continue;
      if (box_within(node, query, radius, strict)) {
        c += node.end - node.begin;
        continue;
      }
      if (node.left == kNone) {
        for (std::size_t i = node.begin; i < node.end; ++i) c += inside(chebyshev(query, points_.row(perm_[i])));
      } else {
        stack.push_back(node.left);
        stack.push_back(node.right);
      }
    }
    return c;
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  struct Node {
    std::size_t begin, end;
    std::size_t left = kNone, right = kNone;
    std::vector<double> lo, hi;  // bounding box
  };

  void check(std::span<const double> query) const {
    if (query.size() != dim()) throw InputError("KnnIndex: query dimension mismatch");
  }

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({begin, end, kNone, kNone, std::vector<double>(dim(), std::numeric_limits<double>::infinity()),
                      std::vector<double>(dim(), -std::numeric_limits<double>::infinity())});
    for (std::size_t i = begin; i < end; ++i) {
      const auto p = points_.row(perm_[i]);
      for (std::size_t j = 0; j < dim(); ++j) {
        nodes_[id].lo[j] = std::min(nodes_[id].lo[j], p[j]);
        nodes_[id].hi[j] = std::max(nodes_[id].hi[j], p[j]);
      }
    }
    if (end - begin <= kLeafSize) return id;
    std::size_t axis = 0;
    double widest = -1.0;
    for (std::size_t j = 0; j < dim(); ++j)
      if (nodes_[id].hi[j] - nodes_[id].lo[j] > widest) {
        widest = nodes_[id].hi[j] - nodes_[id].lo[j];
        axis = j;
      }
    if (widest <= 0.0) return id;  // all points identical
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + static_cast<std::ptrdiff_t>(begin), perm_.begin() + static_cast<std::ptrdiff_t>(mid),
                     perm_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return points_(a, axis) < points_(b, axis); });
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  double box_distance(const Node& node, std::span<const double> q) const noexcept {
    double m = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (q[j] < node.lo[j]) m = std::max(m, node.lo[j] - q[j]);
      else if (q[j] > node.hi[j]) m = std::max(m, q[j] - node.hi[j]);
    }
    return m;
  }

  // Whether the whole box lies inside the ball.
  bool box_within(const Node& node, std::span<const double> q, double radius, bool strict) const noexcept {
    double m = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) m = std::max({m, std::abs(q[j] - node.lo[j]), std::abs(q[j] - node.hi[j])});
    return strict ? m < radius : m <= radius;
  }

  template <typename Offer>
  void search_knn(std::size_t id, std::span<const double> q, std::size_t k, const std::priority_queue<Neighbor>& heap,
                  Offer& offer) const {
    const Node& node = nodes_[id];
    // Equal box distance may still hide a closer index, so prune only on strict excess.
    if (heap.size() == k && box_distance(node, q) > heap.top().distance) return;
    if (node.left == kNone) {
      for (std::size_t i = node.begin; i < node.end; ++i) offer(perm_[i]);
      return;
    }
    const double dl = box_distance(nodes_[node.left], q);
    const double dr = box_distance(nodes_[node.right], q);
    if (dl <= dr) {
      search_knn(node.left, q, k, heap, offer);
      search_knn(node.right, q, k, heap, offer);
    } else {
      search_knn(node.right, q, k, heap, offer);
      search_knn(node.left, q, k, heap, offer);
    }
  }

  FeatureMatrix points_;
  std::vector<std::size_t> perm_;
  std::vector<Node> nodes_;
};

}  // namespace uforest
