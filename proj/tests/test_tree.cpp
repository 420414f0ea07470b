#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "uforest/rng.hpp"
#include "uforest/sim.hpp"
#include "uforest/tree.hpp"

using namespace uforest;

namespace {

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

// Random instance with a few coarse-valued columns so value ties occur.
LabeledDataset random_instance(std::size_t n, std::size_t d, std::size_t k, std::uint64_t seed) {
  CounterRng rng(seed);
  LabeledDataset data;
  data.features = FeatureMatrix(n, d);
  data.labels = std::vector<ClassLabel>(n);
  for (std::size_t c = 0; c < k; ++c) data.label_names.push_back(std::to_string(c));
  for (std::size_t j = 0; j < d; ++j) data.feature_names.push_back("x" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j)
      data.features(i, j) = j % 2 == 1 ? static_cast<double>(rng.below(6)) : rng.normal();
    const double signal = data.features(i, 0) + 0.3 * rng.normal();
    (*data.labels)[i] = static_cast<ClassLabel>(signal > 0.5 ? k - 1 : rng.below(k));
  }
  return data;
}

}  // namespace

TEST(FitTree, SeparableOneDimensional) {
  LabeledDataset data;
  data.features = FeatureMatrix(100, 1);
  data.labels = std::vector<ClassLabel>(100);
  data.feature_names = {"x"};
  data.label_names = {"1", "2"};
  for (std::size_t i = 0; i < 100; ++i) {
    data.features(i, 0) = i < 50 ? -1.0 : 1.0;
    (*data.labels)[i] = i < 50 ? 0 : 1;
  }
  const auto tree = fit_tree(data, TreeParams{}, 1);
  ASSERT_EQ(tree.num_leaves(), 2u);
  const auto& root = tree.nodes()[0];
  EXPECT_GE(root.threshold, -1.0);
  EXPECT_LT(root.threshold, 1.0);
  EXPECT_EQ(tree.leaf_node(0).impurity, 0.0);
  EXPECT_EQ(tree.leaf_node(1).impurity, 0.0);
}

TEST(FitTree, IdenticalLabelsGiveSingleLeaf) {
  auto data = random_instance(50, 3, 2, 4);
  std::ranges::fill(*data.labels, 1);
  const auto tree = fit_tree(data, TreeParams{}, 1);
  EXPECT_EQ(tree.num_leaves(), 1u);
  EXPECT_EQ(tree.depth(), 0u);
}

TEST(FitTree, EmptyPartitionSetFails) {
  const auto data = random_instance(10, 2, 2, 1);
  EXPECT_THROW(fit_tree(data.features, *data.labels, std::vector<std::size_t>{}, 2, TreeParams{}, 1), FitError);
  TreeParams bad;
  bad.n_candidate_features = 5;
  EXPECT_THROW(fit_tree(data, bad, 1), ConfigError);
}

TEST(FitTree, MatchesExhaustiveCartOnSimulatedData) {
  const auto data = sim::sample({sim::SettingKind::Spherical, 1.0, 0.5, 1}, 1000, 17);
  const auto tree = fit_tree(data, TreeParams{}, 5);
  oracle::ExhaustiveCart ref(data.features, *data.labels, 2, 1);
  const auto want = ref.fit(all_rows(data.size()));
  const auto got = oracle::preorder(tree);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].feature, want[i].feature) << "node " << i;
    EXPECT_EQ(got[i].threshold, want[i].threshold) << "node " << i;
    EXPECT_EQ(got[i].count, want[i].count) << "node " << i;
    EXPECT_NEAR(got[i].gini, want[i].gini, 1e-15) << "node " << i;
  }
}

TEST(FitTree, MatchesExhaustiveCartOnRandomInstances) {
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    const std::size_t n = 20 + 9 * inst, d = 1 + inst % 4, k = 2 + inst % 3;
    const std::size_t min_leaf = 1 + inst % 3;
    const auto data = random_instance(n, d, k, 100 + inst);
    TreeParams params;
    params.min_leaf_size = min_leaf;
    params.n_candidate_features = d;
    if (inst % 5 == 4) params.max_depth = 3;
    const auto tree = fit_tree(data, params, inst);
    oracle::ExhaustiveCart ref(data.features, *data.labels, k, min_leaf, params.max_depth);
    EXPECT_EQ(oracle::preorder(tree), ref.fit(all_rows(n))) << "instance " << inst;
  }
}

TEST(FitTree, RespectsMinLeafAndDepth) {
  const auto data = random_instance(300, 4, 3, 8);
  TreeParams params;
  params.min_leaf_size = 7;
  params.max_depth = 4;
  const auto tree = fit_tree(data, params, 2);
  EXPECT_LE(tree.depth(), 4u);
  for (std::size_t l = 0; l < tree.num_leaves(); ++l) EXPECT_GE(tree.leaf_node(l).count, 7u);
}

TEST(FitTree, EverySplitDecreasesImpurity) {
  for (auto imp : {Impurity::Gini, Impurity::Entropy}) {
    const auto data = random_instance(400, 5, 3, 12);
    TreeParams params;
    params.impurity = imp;
    const auto tree = fit_tree(data, params, 3);
    const auto nodes = tree.nodes();
    for (const auto& n : nodes) {
      if (n.is_leaf()) continue;
      const auto& l = nodes[n.left];
      const auto& r = nodes[n.right];
      EXPECT_EQ(l.count + r.count, n.count);
      EXPECT_LT(l.count * l.impurity + r.count * r.impurity, n.count * n.impurity);
    }
  }
}

TEST(FitTree, RowOrderDoesNotMatter) {
  const auto data = random_instance(250, 6, 2, 21);
  auto rows = all_rows(data.size());
  const auto a = fit_tree(data.features, *data.labels, rows, 2, TreeParams{}, 9);
  CounterRng rng(1);
  rng.shuffle(std::span<std::size_t>(rows));
  const auto b = fit_tree(data.features, *data.labels, rows, 2, TreeParams{}, 9);
  EXPECT_EQ(oracle::preorder(a), oracle::preorder(b));
}

TEST(FitTree, MonotoneInvariance) {
  const auto data = random_instance(300, 3, 2, 31);
  auto warped = data;
  for (std::size_t i = 0; i < data.size(); ++i) {
    warped.features(i, 0) = std::exp(data.features(i, 0));
    warped.features(i, 2) = std::pow(data.features(i, 2), 3) + 2 * data.features(i, 2);
  }
  const auto a = fit_tree(data, TreeParams{}, 4);
  const auto b = fit_tree(warped, TreeParams{}, 4);
  ASSERT_EQ(a.num_leaves(), b.num_leaves());
  const auto test = random_instance(2000, 3, 2, 32);
  for (std::size_t i = 0; i < test.size(); ++i) {
    std::vector<double> x(test.features.row(i).begin(), test.features.row(i).end());
    std::vector<double> w = x;
    w[0] = std::exp(x[0]);
    w[2] = std::pow(x[2], 3) + 2 * x[2];
    EXPECT_EQ(a.leaf_of(x), b.leaf_of(w));
  }
}

TEST(FitTree, DeterministicGivenSeed) {
  const auto data = random_instance(300, 9, 2, 41);
  EXPECT_EQ(fit_tree(data, TreeParams{}, 6), fit_tree(data, TreeParams{}, 6));
}

TEST(LeafOf, SingleLeaf) {
  const TreePartition tree(2, {TreeNode{}});
  const std::vector<double> x{3.0, -1e300};
  EXPECT_EQ(tree.leaf_of(x), 0u);
}

TEST(LeafOf, ThresholdRule) {
  TreeNode root;
  root.feature = 0;
  root.threshold = 0.0;
  root.left = 1;
  root.right = 2;
  TreeNode left, right;
  right.leaf = 1;
  const TreePartition tree(1, {root, left, right});
  EXPECT_EQ(tree.leaf_of(std::vector<double>{-5.0}), 0u);
  EXPECT_EQ(tree.leaf_of(std::vector<double>{0.0}), 0u);
  EXPECT_EQ(tree.leaf_of(std::vector<double>{5.0}), 1u);
  EXPECT_THROW(tree.leaf_of(std::vector<double>{1.0, 2.0}), InputError);
}

TEST(LeafOf, AgreesWithRectangleScan) {
  const auto data = random_instance(500, 4, 3, 51);
  const auto tree = fit_tree(data, TreeParams{}, 7);
  const auto cells = oracle::leaf_rectangles(tree);
  CounterRng rng(52);
  std::vector<double> x(4);
  for (int q = 0; q < 10000; ++q) {
    for (std::size_t j = 0; j < 4; ++j)
      x[j] = j % 2 == 1 ? static_cast<double>(rng.below(7)) - 0.5 * static_cast<double>(rng.below(2)) : 2 * rng.normal();
    std::size_t hits = 0, found = 0;
    for (std::size_t l = 0; l < cells.size(); ++l)
      if (cells[l].contains(x)) {
        ++hits;
        found = l;
      }
    ASSERT_EQ(hits, 1u);
    ASSERT_EQ(tree.leaf_of(x), found);
  }
}

TEST(TreePartition, RejectsMalformedNodes) {
  TreeNode root;
  root.feature = 0;
  root.left = 0;
  root.right = 0;
  EXPECT_THROW(TreePartition(1, {root}), InputError);
  EXPECT_THROW(TreePartition(1, {}), InputError);
}
