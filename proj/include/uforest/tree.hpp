#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uforest/dataset.hpp"
#include "uforest/error.hpp"
#include "uforest/rng.hpp"

namespace uforest {

enum class Impurity { Gini, Entropy };

inline std::string to_string(Impurity impurity) { return impurity == Impurity::Gini ? "gini" : "entropy"; }

inline Impurity parse_impurity(const std::string& name) {
  if (name == "gini") return Impurity::Gini;
  if (name == "entropy") return Impurity::Entropy;
  throw ConfigError("unknown impurity '" + name + "' (expected gini or entropy)");
}

struct TreeParams {
  std::size_t min_leaf_size = 1;
  std::optional<std::size_t> max_depth;
  /// Features drawn per split; 0 means ceil(sqrt(d)).
  std::size_t n_candidate_features = 0;
  Impurity impurity = Impurity::Gini;

  std::size_t candidates_for(std::size_t d) const {
    if (n_candidate_features == 0) return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))));
    return n_candidate_features;
  }

  void validate(std::size_t d) const {
    if (min_leaf_size == 0) throw ConfigError("tree: min_leaf_size must be >= 1");
    if (max_depth && *max_depth == 0) throw ConfigError("tree: max_depth must be >= 1 when set");
    if (n_candidate_features > d) throw ConfigError("tree: n_candidate_features exceeds the dimension");
  }

  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

/// A node of a fitted axis-aligned tree. Internal nodes send x to `left`
/// when x[feature] <= threshold; leaves have feature == -1.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::uint32_t leaf = 0;   // leaf id, valid for leaves only
  std::uint32_t count = 0;  // partition-set rows that reached the node
  double impurity = 0.0;    // node impurity per row (Gini or entropy)

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Fitted binary partition of R^d. Node 0 is the root; leaves are numbered
/// 0..num_leaves()-1 in the order they were created.
class TreePartition {
 public:
  TreePartition() = default;
  TreePartition(std::size_t dim, std::vector<TreeNode> nodes) : dim_(dim), nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw InputError("tree: a partition needs at least one node");
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      const auto& node = nodes_[i];
      if (node.is_leaf()) {
        if (node.leaf != leaves_.size()) throw InputError("tree: leaf ids must be dense and in node order");
        leaves_.push_back(i);
      } else if (node.left >= nodes_.size() || node.right >= nodes_.size() || node.left <= i || node.right <= i ||
                 static_cast<std::size_t>(node.feature) >= dim_) {
        throw InputError("tree: malformed internal node");
      }
    }
    depth_ = compute_depth(0);
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t num_leaves() const noexcept { return leaves_.size(); }
  std::span<const TreeNode> nodes() const noexcept { return nodes_; }
  std::span<const std::uint32_t> leaves() const noexcept { return leaves_; }
  const TreeNode& leaf_node(std::size_t leaf) const { return nodes_[leaves_.at(leaf)]; }

  /// Leaf id of x. Throws InputError on a dimension mismatch.
  std::size_t leaf_of(std::span<const double> x) const {
    if (x.size() != dim_)
      throw InputError("leaf_of: expected " + std::to_string(dim_) + " features, got " + std::to_string(x.size()));
    return leaf_of_unchecked(x);
  }

  std::size_t leaf_of_unchecked(std::span<const double> x) const noexcept {
    const TreeNode* node = nodes_.data();
    while (!node->is_leaf()) node = &nodes_[x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right];
    return node->leaf;
  }

  friend bool operator==(const TreePartition& a, const TreePartition& b) { return a.dim_ == b.dim_ && a.nodes_ == b.nodes_; }

 private:
  std::size_t compute_depth(std::uint32_t root) const {
    std::size_t deepest = 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
      auto [id, depth] = stack.back();
      stack.pop_back();
      deepest = std::max(deepest, depth);
      if (!nodes_[id].is_leaf()) {
        stack.emplace_back(nodes_[id].left, depth + 1);
        stack.emplace_back(nodes_[id].right, depth + 1);
      }
    }
    return deepest;
  }

  std::size_t dim_ = 0;
  std::size_t depth_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<std::uint32_t> leaves_;
};

namespace detail {

using Wide = unsigned __int128;

inline double node_impurity(std::span<const std::size_t> counts, std::size_t total, Impurity impurity) {
  if (total == 0) return 0.0;
  const double m = static_cast<double>(total);
  double acc = 0.0;
  if (impurity == Impurity::Gini) {
    for (auto c : counts) acc += static_cast<double>(c) * static_cast<double>(c);
    return 1.0 - acc / (m * m);
  }
  for (auto c : counts)
    if (c > 0) {
      const double p = static_cast<double>(c) / m;
      acc -= p * std::log(p);
    }
  return acc;
}

// m * entropy of the counts, i.e. m log m - sum c log c.
inline double weighted_entropy(std::span<const std::size_t> counts, std::size_t total) {
  if (total == 0) return 0.0;
  double acc = static_cast<double>(total) * std::log(static_cast<double>(total));
  for (auto c : counts)
    if (c > 0) acc -= static_cast<double>(c) * std::log(static_cast<double>(c));
  return acc;
}

struct SplitCandidate {
  bool valid = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  // Gini: maximize (sum_l/m_l + sum_r/m_r), held as the exact fraction num/den.
  Wide num = 0;
  Wide den = 1;
  // Entropy: minimize weighted child entropy.
  double weighted = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const ClassLabel> y, std::size_t num_classes, const TreeParams& params,
              std::uint64_t seed)
      : x_(x), y_(y), k_(num_classes), params_(params), rng_(seed), mtry_(params.candidates_for(x.cols())) {}

  TreePartition build(std::span<const std::size_t> rows) {
    idx_.assign(rows.begin(), rows.end());
    features_.resize(x_.cols());
    std::iota(features_.begin(), features_.end(), std::size_t{0});
    nodes_.clear();
    nodes_.emplace_back();

    struct Pending {
      std::uint32_t node;
      std::size_t begin, end, depth;
    };
    std::vector<Pending> stack{{0, 0, idx_.size(), 0}};
    std::uint32_t next_leaf = 0;
    std::vector<std::size_t> counts(k_);
    while (!stack.empty()) {
      const Pending p = stack.back();
      stack.pop_back();
      std::ranges::fill(counts, 0);
      for (std::size_t i = p.begin; i < p.end; ++i) ++counts[static_cast<std::size_t>(y_[idx_[i]])];
      const std::size_t m = p.end - p.begin;
      nodes_[p.node].count = static_cast<std::uint32_t>(m);
      nodes_[p.node].impurity = node_impurity(counts, m, params_.impurity);

      SplitCandidate split;
      const bool pure = std::ranges::count_if(counts, [](std::size_t c) { return c > 0; }) <= 1;
      const bool depth_reached = params_.max_depth && p.depth >= *params_.max_depth;
      if (!pure && !depth_reached && m >= 2 * params_.min_leaf_size) split = best_split(p.begin, p.end, counts);

      if (!split.valid) {
        nodes_[p.node].feature = -1;
        nodes_[p.node].leaf = next_leaf++;
        continue;
      }
      const auto mid_it = std::partition(idx_.begin() + static_cast<std::ptrdiff_t>(p.begin), idx_.begin() + static_cast<std::ptrdiff_t>(p.end),
                                         [&](std::size_t r) { return x_(r, split.feature) <= split.threshold; });
      const auto mid = static_cast<std::size_t>(mid_it - idx_.begin());
      const auto left = static_cast<std::uint32_t>(nodes_.size());
      nodes_.emplace_back();
      nodes_.emplace_back();
      auto& node = nodes_[p.node];
      node.feature = static_cast<std::int32_t>(split.feature);
      node.threshold = split.threshold;
      node.left = left;
      node.right = left + 1;
      stack.push_back({left + 1, mid, p.end, p.depth + 1});
      stack.push_back({left, p.begin, mid, p.depth + 1});
    }
    renumber_leaves();
    return TreePartition(x_.cols(), std::move(nodes_));
  }

 private:
  // Leaf ids are assigned in visiting order; TreePartition wants them in node order.
  void renumber_leaves() {
    std::uint32_t next = 0;
    for (auto& node : nodes_)
      if (node.is_leaf()) node.leaf = next++;
  }

  SplitCandidate best_split(std::size_t begin, std::size_t end, std::span<const std::size_t> parent_counts) {
    const std::size_t m = end - begin;
    const std::size_t k_min = params_.min_leaf_size;
    rng_.partial_shuffle(std::span<std::size_t>(features_), mtry_);
    candidates_.assign(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(mtry_));
    std::ranges::sort(candidates_);

    SplitCandidate best;
    left_.resize(k_);
    right_.resize(k_);
    for (std::size_t f : candidates_) {
      pairs_.clear();
      for (std::size_t i = begin; i < end; ++i) pairs_.emplace_back(x_(idx_[i], f), y_[idx_[i]]);
      std::ranges::sort(pairs_, {}, &std::pair<double, ClassLabel>::first);
      if (pairs_.front().first == pairs_.back().first) continue;

      std::ranges::fill(left_, 0);
      std::ranges::copy(parent_counts, right_.begin());
      Wide sum_left = 0;
      Wide sum_right = 0;
      for (auto c : parent_counts) sum_right += static_cast<Wide>(c) * c;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        const auto cls = static_cast<std::size_t>(pairs_[i].second);
        sum_left += 2 * static_cast<Wide>(left_[cls]) + 1;
        sum_right -= 2 * static_cast<Wide>(right_[cls]) - 1;
        ++left_[cls];
        --right_[cls];
        const std::size_t m_left = i + 1;
        const std::size_t m_right = m - m_left;
        if (pairs_[i].first == pairs_[i + 1].first || m_left < k_min || m_right < k_min) continue;

        SplitCandidate cand{true, f, pairs_[i].first};
        if (params_.impurity == Impurity::Gini) {
          cand.num = sum_left * m_right + sum_right * m_left;
          cand.den = static_cast<Wide>(m_left) * m_right;
          if (!best.valid || cand.num * best.den > best.num * cand.den) best = cand;
        } else {
          cand.weighted = weighted_entropy(left_, m_left) + weighted_entropy(right_, m_right);
          if (!best.valid || cand.weighted < best.weighted) best = cand;
        }
      }
    }
    if (!best.valid) return best;

    // Split only on a strict impurity decrease.
    if (params_.impurity == Impurity::Gini) {
      Wide parent_sum = 0;
      for (auto c : parent_counts) parent_sum += static_cast<Wide>(c) * c;
      if (!(best.num * m > parent_sum * best.den)) best.valid = false;
    } else {
      const double parent = weighted_entropy(parent_counts, m);
      if (!(best.weighted < parent - 1e-12 * static_cast<double>(m))) best.valid = false;
    }
    return best;
  }

  const FeatureMatrix& x_;
  std::span<const ClassLabel> y_;
  std::size_t k_;
  TreeParams params_;
  CounterRng rng_;
  std::size_t mtry_;
  std::vector<std::size_t> idx_;
  std::vector<std::size_t> features_;
  std::vector<std::size_t> candidates_;
  std::vector<std::pair<double, ClassLabel>> pairs_;
  std::vector<std::size_t> left_, right_;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

/// Grows a CART tree on the given rows of (x, y).
///
/// At each node `n_candidate_features` features are drawn without
/// replacement; for each, sorted values are scanned for the threshold with
/// the lowest weighted child impurity. The threshold is the largest value
/// sent left, so only the order of feature values matters. Ties go to the
/// lower feature index, then the smaller threshold. A node splits only if
/// the impurity strictly decreases and both children keep at least
/// `min_leaf_size` rows. Gini comparisons are exact integer arithmetic.
inline TreePartition fit_tree(const FeatureMatrix& x, std::span<const ClassLabel> y, std::span<const std::size_t> rows,
                              std::size_t num_classes, const TreeParams& params, std::uint64_t seed) {
  if (rows.empty()) throw FitError("fit_tree: empty partition set");
  if (x.cols() == 0) throw FitError("fit_tree: zero-dimensional features");
  params.validate(x.cols());
  detail::TreeBuilder builder(x, y, num_classes, params, seed);
  return builder.build(rows);
}

inline TreePartition fit_tree(const LabeledDataset& partition_set, const TreeParams& params, std::uint64_t seed) {
  const auto& y = partition_set.require_labels();
  std::vector<std::size_t> rows(partition_set.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit_tree(partition_set.features, y, rows, std::max<std::size_t>(partition_set.num_classes(), 1), params, seed);
}

}  // namespace uforest
