#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "uforest/forest.hpp"
#include "uforest/sim.hpp"

using namespace uforest;
using sim::SettingKind;

namespace {

TreePosterior one_leaf(std::vector<double> row, std::size_t n) {
  const std::size_t k = row.size();
  return TreePosterior{k, std::move(row), {n}};
}

ForestConfig small_config(std::size_t trees = 40) {
  ForestConfig c;
  c.n_trees = trees;
  return c;
}

}  // namespace

TEST(SplitSizes, PaperFractions) {
  ForestConfig c;
  c.n_trees = 1;
  const auto s = split_sizes(100, c);
  EXPECT_EQ(s.partition, 40u);
  EXPECT_EQ(s.vote, 30u);
  EXPECT_EQ(s.eval, 30u);

  const auto data = sim::sample({SettingKind::Spherical, 1.0, 0.5, 2}, 100, 1);
  const auto forest = fit_forest(data, c, 3, 1);
  const auto& tree = forest.trees()[0];
  EXPECT_EQ(tree.partition.nodes()[0].count, 40u);
  std::size_t votes = 0;
  for (auto v : tree.raw.leaf_sizes) votes += v;
  EXPECT_EQ(votes, 30u);
  EXPECT_EQ(tree.eval_rows.size(), 30u);
}

TEST(SplitSizes, Errors) {
  ForestConfig c;
  c.frac_eval = 0.5;
  EXPECT_THROW(split_sizes(100, c), ConfigError);
  c = ForestConfig{};
  c.subsample_size = 71;
  EXPECT_THROW(split_sizes(100, c), ConfigError);
  EXPECT_THROW(split_sizes(1, ForestConfig{}), FitError);
}

TEST(FitForest, ThreadCountDoesNotChangeForest) {
  const auto data = sim::sample({SettingKind::Elliptical, 1.0, 0.5, 4}, 400, 2);
  for (auto mode : {EvalMode::TreeLevel, EvalMode::ForestLevel}) {
    auto c = small_config(2);
    c.eval_mode = mode;
    EXPECT_EQ(fit_forest(data, c, 5, 1), fit_forest(data, c, 5, 8));
  }
}

TEST(FitForest, MoreTreesKeepEarlierTrees) {
  const auto data = sim::sample({SettingKind::Spherical, 1.0, 0.5, 2}, 300, 2);
  const auto a = fit_forest(data, small_config(3), 5, 1);
  const auto b = fit_forest(data, small_config(6), 5, 1);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(a.trees()[t], b.trees()[t]);
}

TEST(FitForest, HonestSetsAreDisjoint) {
  const auto data = sim::sample({SettingKind::Spherical, 1.0, 0.5, 1}, 200, 4);
  const auto forest = fit_forest(data, small_config(5), 1, 1);
  for (const auto& tree : forest.trees()) {
    auto eval = tree.eval_rows;
    std::ranges::sort(eval);
    EXPECT_EQ(std::ranges::adjacent_find(eval), eval.end());
    // n=200: 60 evaluation rows, then 140 split 80/60 into partition and voting sets.
    EXPECT_EQ(eval.size(), 60u);
    EXPECT_EQ(tree.partition.nodes()[0].count, 80u);
    std::size_t votes = 0;
    for (auto v : tree.raw.leaf_sizes) votes += v;
    EXPECT_EQ(votes, 60u);
  }
}

TEST(FitForest, Errors) {
  auto data = sim::sample({SettingKind::Spherical, 1.0, 0.5, 1}, 100, 4);
  std::ranges::fill(*data.labels, 0);
  EXPECT_THROW(fit_forest(data, small_config(), 1), FitError);
  auto unlabeled = data;
  unlabeled.labels.reset();
  EXPECT_THROW(fit_forest(unlabeled, small_config(), 1), InputError);
  ForestConfig bad;
  bad.frac_partition = 0.5;
  EXPECT_THROW(fit_forest(sim::sample({SettingKind::Spherical, 1.0, 0.5, 1}, 100, 4), bad, 1), ConfigError);
}

TEST(FiniteSampleCorrect, Examples) {
  auto a = finite_sample_correct(one_leaf({1.0, 0.0}, 3), 3.0);
  EXPECT_NEAR(a.probs[0], 0.9, 1e-15);
  EXPECT_NEAR(a.probs[1], 0.1, 1e-15);

  auto b = finite_sample_correct(one_leaf({0.5, 0.5}, 7), 2.5);
  EXPECT_EQ(b.probs, (std::vector<double>{0.5, 0.5}));

  auto c = finite_sample_correct(one_leaf({1.0, 0.0, 0.0}, 10), 3.0);
  EXPECT_NEAR(c.probs[0], 30.0 / 32, 1e-15);
  EXPECT_NEAR(c.probs[1], 1.0 / 32, 1e-15);
  EXPECT_NEAR(c.probs[2], 1.0 / 32, 1e-15);
  EXPECT_NEAR(1.0 - c.probs[0], 2.0 / 32, 1e-15);
  EXPECT_LE(1.0 - c.probs[0], 3.0 / (3.0 * 10));

  EXPECT_THROW(finite_sample_correct(one_leaf({1.0, 0.0}, 3), 0.0), ConfigError);
}

TEST(FiniteSampleCorrect, EmptyLeavesSkipped) {
  TreePosterior p{2, {0.0, 0.0, 1.0, 0.0}, {0, 4}};
  const auto q = finite_sample_correct(p, 3.0);
  EXPECT_EQ(q.probs[0], 0.0);
  EXPECT_EQ(q.probs[1], 0.0);
  EXPECT_NEAR(q.probs[2], 12.0 / 13, 1e-15);
}

TEST(FiniteSampleCorrect, LemmaOneBound) {
  CounterRng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + rng.below(9);
    const std::size_t n = 1 + rng.below(100);
    const double kappa = 0.1 + 9.9 * rng.uniform();
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[rng.below(std::min<std::uint64_t>(k, 1 + rng.below(k)))];
    std::vector<double> row(k);
    for (std::size_t c = 0; c < k; ++c) row[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
    const auto corrected = finite_sample_correct(one_leaf(row, n), kappa);
    double dist = 0, sum = 0;
    for (std::size_t c = 0; c < k; ++c) {
      dist = std::max(dist, std::abs(corrected.probs[c] - row[c]));
      sum += corrected.probs[c];
    }
    ASSERT_LE(dist, static_cast<double>(k) / (kappa * static_cast<double>(n)) + 1e-15);
    ASSERT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(VotePosterior, EmpiricalFrequencies) {
  const TreePartition tree(1, {TreeNode{}});
  const FeatureMatrix x(4, 1, {0, 1, 2, 3});
  const std::vector<ClassLabel> y{0, 0, 1, 1};
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  const auto post = vote_posterior(tree, x, y, rows, 2);
  EXPECT_EQ(post.probs, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(post.leaf_sizes, (std::vector<std::size_t>{4}));

  FittedTree fitted{tree, post, post, {}};
  ForestConfig c;
  c.n_trees = 1;
  c.correction = false;
  const UncertaintyForest forest(c, 0, 1, 2, 4, {fitted}, {});
  EXPECT_EQ(forest.posterior(std::vector<double>{17.0}), (std::vector<double>{0.5, 0.5}));
  EXPECT_NEAR(forest.conditional_entropy_at(std::vector<double>{0.0}), std::log(2.0), 1e-15);
  EXPECT_THROW(forest.posterior(std::vector<double>{1.0, 2.0}), InputError);
}

TEST(Posterior, OnSimplexAndSymmetric) {
  const auto data = sim::sample({SettingKind::Spherical, 1.0, 0.5, 1}, 2000, 8);
  const auto forest = fit_forest(data, small_config(100), 3, 0);
  for (double x = -4; x <= 4; x += 0.1) {
    const auto p = forest.posterior(std::vector<double>{x});
    EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
    EXPECT_GE(p[0], 0.0);
    EXPECT_GE(p[1], 0.0);
  }
  EXPECT_NEAR(forest.posterior(std::vector<double>{0.0})[1], 0.5, 0.15);
  EXPECT_GE(forest.posterior(std::vector<double>{3.0})[1], 0.9);
}

TEST(ConditionalEntropy, Examples) {
  EXPECT_EQ(entropy(std::vector<double>{1.0, 0.0}), 0.0);
  EXPECT_NEAR(entropy(std::vector<double>{0.5, 0.5}), 0.6931, 1e-4);
  EXPECT_NEAR(entropy(std::vector<double>{0.75, 0.25}), 0.5623, 1e-4);
}

TEST(Estimate, IndependentLabels) {
  const auto data = sim::sample({SettingKind::Spherical, 0.0, 0.5, 1}, 3000, 9);
  const auto r = estimate_mutual_information(data, small_config(100), 4, 0);
  EXPECT_NEAR(r.h_y_given_x, std::log(2.0), 0.03);
  EXPECT_NEAR(r.mi, 0.0, 0.03);
  EXPECT_EQ(r.mi, r.h_y - r.h_y_given_x);
  EXPECT_EQ(r.per_tree_values.size(), 100u);
}

TEST(Estimate, NearTruthSpherical) {
  const auto data = sim::sample({SettingKind::Spherical, 1.0, 0.5, 1}, 4000, 10);
  const auto r = estimate_mutual_information(data, small_config(100), 4, 0);
  EXPECT_NEAR(r.h_y_given_x, sim::truth({SettingKind::Spherical, 1.0, 0.5, 1}).h_y_given_x, 0.06);
  EXPECT_LE(r.h_y_given_x, r.h_y + 0.02);
}

TEST(Estimate, AllModesInRange) {
  const auto data = sim::sample({SettingKind::ThreeClass, 1.0, 1.0 / 3, 3}, 900, 11);
  for (auto mode : {EvalMode::TreeLevel, EvalMode::ForestLevel})
    for (auto agg : {Aggregation::VoteWeighted, Aggregation::Uniform, Aggregation::PerTreeEntropy}) {
      auto c = small_config(20);
      c.eval_mode = mode;
      c.aggregation = agg;
      const auto r = estimate_mutual_information(data, c, 2, 0);
      EXPECT_GE(r.h_y_given_x, 0.0);
      EXPECT_LE(r.h_y_given_x, std::log(3.0));
      EXPECT_EQ(r.mi, r.h_y - r.h_y_given_x);
    }
}

TEST(Estimate, ThreadIndependent) {
  const auto data = sim::sample({SettingKind::Elliptical, 1.0, 0.5, 3}, 800, 12);
  for (auto mode : {EvalMode::TreeLevel, EvalMode::ForestLevel}) {
    auto c = small_config(16);
    c.eval_mode = mode;
    const auto a = estimate_mutual_information(data, c, 6, 1);
    const auto b = estimate_mutual_information(data, c, 6, 5);
    EXPECT_EQ(a.h_y_given_x, b.h_y_given_x);
    EXPECT_EQ(a.per_tree_values, b.per_tree_values);
  }
}

TEST(Estimate, MonotoneInvariance) {
  const auto data = sim::sample({SettingKind::Spherical, 1.0, 0.5, 3}, 900, 13);
  auto warped = data;
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) warped.features(i, j) = std::atan(data.features(i, j)) * (j + 1) + 5.0;
  const auto a = estimate_mutual_information(data, small_config(20), 7, 1);
  const auto b = estimate_mutual_information(warped, small_config(20), 7, 1);
  EXPECT_EQ(a.h_y_given_x, b.h_y_given_x);
  EXPECT_EQ(a.mi, b.mi);
}

TEST(Estimate, CartConfigIsDishonestUncorrected) {
  const auto c = ForestConfig::cart();
  EXPECT_FALSE(c.honest);
  EXPECT_FALSE(c.correction);
  const auto data = sim::sample({SettingKind::Spherical, 1.0, 0.5, 1}, 600, 14);
  auto cc = c;
  cc.n_trees = 5;
  const auto forest = fit_forest(data, cc, 1, 1);
  for (const auto& tree : forest.trees()) {
    std::size_t votes = 0;
    for (auto v : tree.raw.leaf_sizes) votes += v;
    EXPECT_EQ(votes, tree.partition.nodes()[0].count);
    // Fully grown dishonest trees have pure leaves, so raw rows are one-hot.
    for (double p : tree.posterior.probs) EXPECT_TRUE(p == 0.0 || p == 1.0);
  }
}

TEST(EstimateReport, RecordEchoesDefaults) {
  EstimateReport r;
  r.config = ForestConfig{};
  const auto rec = r.to_record();
  auto find = [&](const std::string& key) {
    for (const auto& [k, v] : rec)
      if (k == key) return v;
    return std::string("<missing>");
  };
  EXPECT_EQ(find("n_trees"), "300");
  EXPECT_EQ(find("kappa"), "3");
  EXPECT_EQ(find("min_leaf_size"), "1");
  EXPECT_EQ(find("impurity"), "gini");
}
