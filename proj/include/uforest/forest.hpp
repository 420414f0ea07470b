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
#include "uforest/entropy.hpp"
#include "uforest/error.hpp"
#include "uforest/format.hpp"
#include "uforest/parallel.hpp"
#include "uforest/rng.hpp"
#include "uforest/tree.hpp"

namespace uforest {

/// Where the evaluation set comes from. TreeLevel draws a fresh evaluation
/// set for every tree and averages per-tree entropies; ForestLevel holds out
/// one evaluation set for all trees and averages forest posteriors.
enum class EvalMode { TreeLevel, ForestLevel };

inline std::string to_string(EvalMode mode) { return mode == EvalMode::TreeLevel ? "tree" : "forest"; }

/// How tree posteriors are combined into an entropy estimate.
///   VoteWeighted: per evaluated row, average the tree posteriors weighted by
///                 the voting count of the leaf the row falls into.
///   Uniform: per evaluated row, plain average of the tree posteriors.
///   PerTreeEntropy: each tree scores rows with its own posterior alone and
///                   the per-tree mean entropies are averaged.
enum class Aggregation { VoteWeighted, Uniform, PerTreeEntropy };

inline std::string to_string(Aggregation a) {
  switch (a) {
    case Aggregation::VoteWeighted: return "votes";
    case Aggregation::Uniform: return "uniform";
    case Aggregation::PerTreeEntropy: return "per-tree";
  }
  return "?";
}

inline Aggregation parse_aggregation(const std::string& name) {
  if (name == "votes") return Aggregation::VoteWeighted;
  if (name == "uniform") return Aggregation::Uniform;
  if (name == "per-tree") return Aggregation::PerTreeEntropy;
  throw ConfigError("unknown aggregation '" + name + "' (expected votes, uniform or per-tree)");
}

inline EvalMode parse_eval_mode(const std::string& name) {
  if (name == "tree") return EvalMode::TreeLevel;
  if (name == "forest") return EvalMode::ForestLevel;
  throw ConfigError("unknown eval mode '" + name + "' (expected tree or forest)");
}

struct ForestConfig {
  std::size_t n_trees = 300;
  TreeParams tree_params{};
  double kappa = 3.0;
  double frac_partition = 0.4;
  double frac_vote = 0.3;
  double frac_eval = 0.3;
  EvalMode eval_mode = EvalMode::TreeLevel;
  Aggregation aggregation = Aggregation::VoteWeighted;
  bool honest = true;
  bool correction = true;
  /// Rows drawn per tree (partition + voting); defaults to every non-evaluation row.
  std::optional<std::size_t> subsample_size;

  /// The plain CART forest: same sampling, no honesty, no correction, and
  /// an unweighted average of tree posteriors.
  static ForestConfig cart() {
    ForestConfig c;
    c.honest = false;
    c.correction = false;
    c.aggregation = Aggregation::Uniform;
    return c;
  }

  void validate() const {
    if (n_trees == 0) throw ConfigError("forest: n_trees must be >= 1");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("forest: kappa must be positive");
    for (double f : {frac_partition, frac_vote, frac_eval})
      if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("forest: split fractions must lie in [0, 1]");
    if (std::abs(frac_partition + frac_vote + frac_eval - 1.0) > 1e-9)
      throw ConfigError("forest: partition/vote/eval fractions must sum to 1");
    if (!(frac_partition > 0.0)) throw ConfigError("forest: frac_partition must be positive");
    if (honest && !(frac_vote > 0.0)) throw ConfigError("forest: honest forests need frac_vote > 0");
    if (subsample_size && *subsample_size == 0) throw ConfigError("forest: subsample_size must be >= 1");
    if (tree_params.min_leaf_size == 0) throw ConfigError("forest: min_leaf_size must be >= 1");
  }

  friend bool operator==(const ForestConfig&, const ForestConfig&) = default;
};

/// Row counts of the evaluation / partition / voting sets for n rows.
struct SplitSizes {
  std::size_t eval = 0;
  std::size_t pool = 0;       // rows available to trees, n - eval
  std::size_t subsample = 0;  // s
  std::size_t partition = 0;
  std::size_t vote = 0;       // equals `partition` for dishonest forests (same rows)
};

inline SplitSizes split_sizes(std::size_t n, const ForestConfig& config) {
  config.validate();
  SplitSizes s;
  s.eval = static_cast<std::size_t>(std::llround(config.frac_eval * static_cast<double>(n)));
  s.pool = n - s.eval;
  s.subsample = config.subsample_size.value_or(s.pool);
  if (s.subsample > s.pool)
    throw ConfigError("forest: subsample_size " + std::to_string(s.subsample) + " exceeds the " + std::to_string(s.pool) +
                      " non-evaluation rows");
  if (config.honest) {
    const double share = config.frac_partition / (config.frac_partition + config.frac_vote);
    s.partition = static_cast<std::size_t>(std::llround(share * static_cast<double>(s.subsample)));
    s.vote = s.subsample - s.partition;
  } else {
    s.partition = s.vote = s.subsample;
  }
  if (s.partition == 0) throw FitError("forest: too few rows for a nonempty partition set");
  if (s.vote == 0) throw FitError("forest: too few rows for a nonempty voting set");
  return s;
}

/// Per-leaf class probabilities of one tree plus the voting count of each leaf.
struct TreePosterior {
  std::size_t num_classes = 0;
  std::vector<double> probs;             // leaves x classes, row-major
  std::vector<std::size_t> leaf_sizes;   // voting rows per leaf

  std::size_t num_leaves() const noexcept { return leaf_sizes.size(); }
  bool empty(std::size_t leaf) const noexcept { return leaf_sizes[leaf] == 0; }
  std::span<const double> row(std::size_t leaf) const noexcept { return {probs.data() + leaf * num_classes, num_classes}; }
  std::span<double> row(std::size_t leaf) noexcept { return {probs.data() + leaf * num_classes, num_classes}; }

  friend bool operator==(const TreePosterior&, const TreePosterior&) = default;
};

/// Empirical class frequencies of the voting rows in each leaf. Leaves
/// without votes keep an all-zero row.
inline TreePosterior vote_posterior(const TreePartition& tree, const FeatureMatrix& x, std::span<const ClassLabel> y,
                                    std::span<const std::size_t> voting_rows, std::size_t num_classes) {
  TreePosterior post;
  post.num_classes = num_classes;
  post.probs.assign(tree.num_leaves() * num_classes, 0.0);
  post.leaf_sizes.assign(tree.num_leaves(), 0);
  for (std::size_t r : voting_rows) {
    const std::size_t leaf = tree.leaf_of_unchecked(x.row(r));
    post.probs[leaf * num_classes + static_cast<std::size_t>(y[r])] += 1.0;
    ++post.leaf_sizes[leaf];
  }
  for (std::size_t l = 0; l < post.num_leaves(); ++l)
    if (post.leaf_sizes[l] > 0)
      for (double& p : post.row(l)) p /= static_cast<double>(post.leaf_sizes[l]);
  return post;
}

/// Replaces every zero probability of a leaf with N voting rows by
/// 1 / (kappa N), then renormalizes the row. Empty leaves are left as-is.
inline TreePosterior finite_sample_correct(TreePosterior posterior, double kappa) {
  if (!(kappa > 0.0)) throw ConfigError("finite_sample_correct: kappa must be positive");
  for (std::size_t l = 0; l < posterior.num_leaves(); ++l) {
    if (posterior.empty(l)) continue;
    auto row = posterior.row(l);
    const double fill = 1.0 / (kappa * static_cast<double>(posterior.leaf_sizes[l]));
    double total = 0.0;
    for (double& p : row) {
      if (p == 0.0) p = fill;
      total += p;
    }
    for (double& p : row) p /= total;
  }
  return posterior;
}

/// One honest tree: the partition, its raw and final voting posteriors, and
/// (in tree-level mode) the rows it evaluates.
struct FittedTree {
  TreePartition partition;
  TreePosterior raw;
  TreePosterior posterior;
  std::vector<std::size_t> eval_rows;

  friend bool operator==(const FittedTree&, const FittedTree&) = default;
};

class UncertaintyForest {
 public:
  UncertaintyForest(ForestConfig config, std::uint64_t seed, std::size_t dim, std::size_t num_classes, std::size_t fit_rows,
                    std::vector<FittedTree> trees, std::vector<std::size_t> shared_eval_rows)
      : config_(std::move(config)),
        seed_(seed),
        dim_(dim),
        num_classes_(num_classes),
        fit_rows_(fit_rows),
        trees_(std::move(trees)),
        shared_eval_rows_(std::move(shared_eval_rows)) {}

  const ForestConfig& config() const noexcept { return config_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t num_trees() const noexcept { return trees_.size(); }
  /// Number of rows of the dataset the forest was fitted on.
  std::size_t fit_rows() const noexcept { return fit_rows_; }
  std::span<const FittedTree> trees() const noexcept { return trees_; }
  std::span<const std::size_t> shared_eval_rows() const noexcept { return shared_eval_rows_; }

  /// Forest posterior: mean over trees of the corrected leaf rows.
  std::vector<double> posterior(std::span<const double> x) const {
    check_dim(x);
    std::vector<double> out(num_classes_, 0.0);
    accumulate_posterior(x, out);
    return out;
  }

  /// Writes the forest posterior at x into `out` (size K). Dimension is not checked.
  void accumulate_posterior(std::span<const double> x, std::span<double> out) const {
    std::ranges::fill(out, 0.0);
    PosteriorSum sum(out);
    for (const auto& tree : trees_) sum.add(tree, tree.partition.leaf_of_unchecked(x), config_.aggregation);
    sum.finish();
  }

  /// Running weighted sum of tree rows for one point. Falls back to the
  /// plain mean when every contributing leaf is vote-empty.
  class PosteriorSum {
   public:
    explicit PosteriorSum(std::span<double> out) : out_(out), plain_(out.size(), 0.0) { std::ranges::fill(out_, 0.0); }

    void add(const FittedTree& tree, std::size_t leaf, Aggregation aggregation) noexcept {
      const auto row = tree.posterior.row(leaf);
      const double w = aggregation == Aggregation::VoteWeighted ? static_cast<double>(tree.posterior.leaf_sizes[leaf]) : 1.0;
      for (std::size_t k = 0; k < out_.size(); ++k) {
        out_[k] += w * row[k];
        plain_[k] += row[k];
      }
      weight_ += w;
      ++count_;
    }

    std::size_t count() const noexcept { return count_; }

    void finish() noexcept {
      if (count_ == 0) return;
      if (weight_ > 0.0) {
        for (double& p : out_) p /= weight_;
      } else {
        for (std::size_t k = 0; k < out_.size(); ++k) out_[k] = plain_[k] / static_cast<double>(count_);
      }
    }

   private:
    std::span<double> out_;
    std::vector<double> plain_;
    double weight_ = 0.0;
    std::size_t count_ = 0;
  };

  /// Plug-in conditional entropy of the forest posterior at x, in nats.
  double conditional_entropy_at(std::span<const double> x) const { return entropy(posterior(x)); }

  friend bool operator==(const UncertaintyForest&, const UncertaintyForest&) = default;

  void check_dim(std::span<const double> x) const {
    if (x.size() != dim_)
      throw InputError("expected " + std::to_string(dim_) + " features, got " + std::to_string(x.size()));
  }

 private:
  ForestConfig config_;
  std::uint64_t seed_;
  std::size_t dim_;
  std::size_t num_classes_;
  std::size_t fit_rows_;
  std::vector<FittedTree> trees_;
  std::vector<std::size_t> shared_eval_rows_;
};

namespace detail {

inline constexpr std::uint64_t kForestEvalStream = 0xe7a1ULL;

inline std::vector<double> marginal_frequencies(std::span<const ClassLabel> y, std::span<const std::size_t> rows,
                                                std::size_t num_classes) {
  std::vector<double> freq(num_classes, 0.0);
  for (std::size_t r : rows) freq[static_cast<std::size_t>(y[r])] += 1.0;
  for (double& f : freq) f /= static_cast<double>(rows.size());
  return freq;
}

inline FittedTree fit_one_tree(const LabeledDataset& data, const ForestConfig& config, const SplitSizes& sizes,
                               std::span<const std::size_t> shared_pool, std::uint64_t tree_seed) {
  const auto& y = *data.labels;
  const std::size_t k = data.num_classes();
  CounterRng rng(tree_seed);
  FittedTree tree;

  std::vector<std::size_t> order;
  if (config.eval_mode == EvalMode::TreeLevel) {
    order.resize(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.partial_shuffle(std::span<std::size_t>(order), sizes.eval + sizes.subsample);
    tree.eval_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sizes.eval));
    order.erase(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sizes.eval));
  } else {
    order.assign(shared_pool.begin(), shared_pool.end());
    rng.partial_shuffle(std::span<std::size_t>(order), sizes.subsample);
  }
  order.resize(sizes.subsample);

  std::span<const std::size_t> partition_rows(order.data(), sizes.partition);
  std::span<const std::size_t> voting_rows =
      config.honest ? std::span<const std::size_t>(order.data() + sizes.partition, sizes.vote) : partition_rows;

  tree.partition = fit_tree(data.features, y, partition_rows, k, config.tree_params, rng());
  tree.raw = vote_posterior(tree.partition, data.features, y, voting_rows, k);
  tree.posterior = config.correction ? finite_sample_correct(tree.raw, config.kappa) : tree.raw;

  // Leaves that received no votes fall back to the voting-set class frequencies.
  TreePosterior fallback{k, marginal_frequencies(y, voting_rows, k), {voting_rows.size()}};
  if (config.correction) fallback = finite_sample_correct(std::move(fallback), config.kappa);
  for (std::size_t l = 0; l < tree.posterior.num_leaves(); ++l)
    if (tree.posterior.empty(l)) std::ranges::copy(fallback.probs, tree.posterior.row(l).begin());
  return tree;
}

}  // namespace detail

/// Fits B honest trees. Tree b uses its own stream derived from (seed, b),
/// so results do not depend on the thread count or on B for earlier trees.
inline UncertaintyForest fit_forest(const LabeledDataset& data, const ForestConfig& config, std::uint64_t seed,
                                    unsigned threads = 0) {
  config.validate();
  const auto& y = data.require_labels();
  if (data.size() == 0 || data.dim() == 0) throw FitError("fit_forest: empty dataset");
  const std::size_t k = data.num_classes();
  {
    const auto counts = class_counts(y, k);
    if (std::ranges::count_if(counts, [](std::size_t c) { return c > 0; }) < 2)
      throw FitError("fit_forest: at least two classes must be present");
  }
  const SplitSizes sizes = split_sizes(data.size(), config);

  std::vector<std::size_t> shared_eval;
  std::vector<std::size_t> shared_pool;
  if (config.eval_mode == EvalMode::ForestLevel) {
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng rng(derive_seed(seed, detail::kForestEvalStream));
    rng.shuffle(std::span<std::size_t>(order));
    shared_eval.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sizes.eval));
    shared_pool.assign(order.begin() + static_cast<std::ptrdiff_t>(sizes.eval), order.end());
  }

  std::vector<FittedTree> trees(config.n_trees);
  parallel_for(
      config.n_trees,
      [&](std::size_t b) { trees[b] = detail::fit_one_tree(data, config, sizes, shared_pool, derive_seed(seed, b)); },
      threads);
  return UncertaintyForest(config, seed, data.dim(), k, data.size(), std::move(trees), std::move(shared_eval));
}

/// Result of an entropy / mutual-information estimate, in nats.
struct EstimateReport {
  std::string estimator = "uf";
  double h_y_given_x = 0.0;
  double h_y = 0.0;
  double mi = 0.0;
  double mi_normalized = 0.0;
  std::vector<double> per_tree_values;
  std::optional<ForestConfig> config;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t d = 0;

  /// Flat key/value view used by the CLI writers.
  std::vector<std::pair<std::string, std::string>> to_record() const {
    std::vector<std::pair<std::string, std::string>> rec{
        {"estimator", estimator},          {"n", std::to_string(n)},
        {"d", std::to_string(d)},          {"seed", std::to_string(seed)},
        {"h_y", format_g17(h_y)},          {"h_y_given_x", format_g17(h_y_given_x)},
        {"mi", format_g17(mi)},            {"mi_normalized", format_g17(mi_normalized)}};
    if (config) {
      const auto& c = *config;
      rec.emplace_back("n_trees", std::to_string(c.n_trees));
      rec.emplace_back("min_leaf_size", std::to_string(c.tree_params.min_leaf_size));
      rec.emplace_back("max_depth", c.tree_params.max_depth ? std::to_string(*c.tree_params.max_depth) : "none");
      rec.emplace_back("n_candidate_features",
                       c.tree_params.n_candidate_features ? std::to_string(c.tree_params.n_candidate_features) : "ceil(sqrt(d))");
      rec.emplace_back("impurity", to_string(c.tree_params.impurity));
      rec.emplace_back("kappa", format_g17(c.kappa));
      rec.emplace_back("frac_partition", format_g17(c.frac_partition));
      rec.emplace_back("frac_vote", format_g17(c.frac_vote));
      rec.emplace_back("frac_eval", format_g17(c.frac_eval));
      rec.emplace_back("eval_mode", to_string(c.eval_mode));
      rec.emplace_back("aggregation", to_string(c.aggregation));
      rec.emplace_back("honest", c.honest ? "true" : "false");
      rec.emplace_back("correction", c.correction ? "true" : "false");
      rec.emplace_back("subsample_size", c.subsample_size ? std::to_string(*c.subsample_size) : "auto");
    }
    return rec;
  }
};

/// Mean conditional entropy over the forest's held-out evaluation rows of
/// `data` (the dataset it was fitted on).
///
/// TreeLevel: tree b holds out its own rows. With a posterior aggregation,
/// each row that was held out by at least one tree is scored with the
/// combined posterior of exactly those trees; with PerTreeEntropy each tree
/// scores its rows alone and the per-tree means are averaged. ForestLevel:
/// the shared held-out rows are scored with the whole forest.
inline EstimateReport estimate_conditional_entropy(const UncertaintyForest& forest, const FeatureMatrix& data,
                                                   unsigned threads = 0) {
  if (data.rows() != forest.fit_rows() || data.cols() != forest.dim())
    throw InputError("estimate_conditional_entropy: data does not match the fitted forest");
  const auto& config = forest.config();
  EstimateReport report;
  report.config = config;
  report.seed = forest.seed();
  report.n = data.rows();
  report.d = data.cols();
  const std::size_t k = forest.num_classes();
  const auto trees = forest.trees();

  if (config.eval_mode == EvalMode::TreeLevel) {
    if (trees.front().eval_rows.empty()) throw FitError("estimate_conditional_entropy: empty evaluation set");
    // Leaf of every held-out row, per tree; also the per-tree mean entropy.
    std::vector<std::vector<std::size_t>> leaves(trees.size());
    report.per_tree_values.assign(trees.size(), 0.0);
    parallel_for(
        trees.size(),
        [&](std::size_t b) {
          const auto& tree = trees[b];
          leaves[b].resize(tree.eval_rows.size());
          double acc = 0.0;
          for (std::size_t i = 0; i < tree.eval_rows.size(); ++i) {
            leaves[b][i] = tree.partition.leaf_of_unchecked(data.row(tree.eval_rows[i]));
            acc += entropy(tree.posterior.row(leaves[b][i]));
          }
          report.per_tree_values[b] = acc / static_cast<double>(tree.eval_rows.size());
        },
        threads);

    if (config.aggregation == Aggregation::PerTreeEntropy) {
      double total = 0.0;
      for (double v : report.per_tree_values) total += v;
      report.h_y_given_x = total / static_cast<double>(trees.size());
      return report;
    }
    // Trees are folded in index order so the sums do not depend on scheduling.
    std::vector<double> sums(data.rows() * k, 0.0);
    std::vector<double> plain(data.rows() * k, 0.0);
    std::vector<double> weights(data.rows(), 0.0);
    std::vector<std::size_t> hits(data.rows(), 0);
    for (std::size_t b = 0; b < trees.size(); ++b) {
      const auto& tree = trees[b];
      for (std::size_t i = 0; i < tree.eval_rows.size(); ++i) {
        const std::size_t r = tree.eval_rows[i];
        const std::size_t leaf = leaves[b][i];
        const auto row = tree.posterior.row(leaf);
        const double w =
            config.aggregation == Aggregation::VoteWeighted ? static_cast<double>(tree.posterior.leaf_sizes[leaf]) : 1.0;
        for (std::size_t c = 0; c < k; ++c) {
          sums[r * k + c] += w * row[c];
          plain[r * k + c] += row[c];
        }
        weights[r] += w;
        ++hits[r];
      }
    }
    double total = 0.0;
    std::size_t evaluated = 0;
    std::vector<double> p(k);
    for (std::size_t r = 0; r < data.rows(); ++r) {
      if (hits[r] == 0) continue;
      for (std::size_t c = 0; c < k; ++c)
        p[c] = weights[r] > 0.0 ? sums[r * k + c] / weights[r] : plain[r * k + c] / static_cast<double>(hits[r]);
      total += entropy(p);
      ++evaluated;
    }
    report.h_y_given_x = total / static_cast<double>(evaluated);
    return report;
  }

  const auto rows = forest.shared_eval_rows();
  if (rows.empty()) throw FitError("estimate_conditional_entropy: empty evaluation set");
  std::vector<double> values(rows.size());
  if (config.aggregation == Aggregation::PerTreeEntropy) {
    report.per_tree_values.assign(trees.size(), 0.0);
    parallel_for(
        trees.size(),
        [&](std::size_t b) {
          double acc = 0.0;
          for (std::size_t r : rows) acc += entropy(trees[b].posterior.row(trees[b].partition.leaf_of_unchecked(data.row(r))));
          report.per_tree_values[b] = acc / static_cast<double>(rows.size());
        },
        threads);
    values = report.per_tree_values;
  } else {
    parallel_for(
        rows.size(),
        [&](std::size_t i) {
          std::vector<double> p(k);
          forest.accumulate_posterior(data.row(rows[i]), p);
          values[i] = entropy(p);
        },
        threads);
  }
  double total = 0.0;
  for (double v : values) total += v;
  report.h_y_given_x = total / static_cast<double>(values.size());
  return report;
}

/// Mean conditional entropy of the forest posterior over arbitrary
/// (possibly unlabeled) evaluation rows.
inline double mean_conditional_entropy(const UncertaintyForest& forest, const FeatureMatrix& eval_rows,
                                       unsigned threads = 0) {
  if (eval_rows.rows() == 0) throw InputError("mean_conditional_entropy: empty evaluation set");
  if (eval_rows.cols() != forest.dim()) throw InputError("mean_conditional_entropy: dimension mismatch");
  std::vector<double> values(eval_rows.rows());
  parallel_for(
      eval_rows.rows(),
      [&](std::size_t i) {
        std::vector<double> p(forest.num_classes());
        forest.accumulate_posterior(eval_rows.row(i), p);
        values[i] = entropy(p);
      },
      threads);
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

inline void finish_mutual_information(EstimateReport& report) {
  report.mi = report.h_y - report.h_y_given_x;
  report.mi_normalized = report.h_y > 0.0 ? report.mi / report.h_y : 0.0;
}

/// Fits a forest and reports H(Y) (all labeled rows), H(Y|X), and their
/// difference. The estimate is not clamped and may be slightly negative.
inline EstimateReport estimate_mutual_information(const LabeledDataset& data, const ForestConfig& config,
                                                  std::uint64_t seed, unsigned threads = 0) {
  const auto forest = fit_forest(data, config, seed, threads);
  EstimateReport report = estimate_conditional_entropy(forest, data.features, threads);
  report.estimator = config.honest ? (config.correction ? "uf" : "honest") : (config.correction ? "corrected-cart" : "cart");
  report.h_y = entropy_of_counts(class_counts(*data.labels, data.num_classes()));
  finish_mutual_information(report);
  return report;
}

}  // namespace uforest
