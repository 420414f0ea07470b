#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "uforest/inference.hpp"
#include "uforest/sim.hpp"

using namespace uforest;
using sim::SettingKind;

namespace {

ForestConfig small_config(std::size_t trees = 20) {
  ForestConfig c;
  c.n_trees = trees;
  return c;
}

}  // namespace

TEST(PValue, AddOneFormula) {
  const std::vector<double> nulls{0.1, 0.5, 0.2, 0.5};
  EXPECT_DOUBLE_EQ(permutation_p_value(0.5, nulls), 3.0 / 5);
  EXPECT_DOUBLE_EQ(permutation_p_value(0.6, nulls), 1.0 / 5);
  EXPECT_DOUBLE_EQ(permutation_p_value(0.0, nulls), 1.0);
}

TEST(PermutationTest, StrongDependenceHitsFloor) {
  const auto data = sim::sample({SettingKind::Spherical, 10.0, 0.5, 1}, 1000, 1);
  const auto r = permutation_test(data, small_config(10), 99, 2, 0);
  EXPECT_EQ(r.null_values.size(), 99u);
  EXPECT_DOUBLE_EQ(r.p_value, 0.01);
  EXPECT_GT(r.observed, 0.6);
}

TEST(PermutationTest, NullReplicatesStaySmall) {
  const auto data = sim::sample({SettingKind::Spherical, 0.0, 0.5, 1}, 400, 3);
  const auto r = permutation_test(data, small_config(10), 39, 4, 0);
  EXPECT_GT(r.p_value, 1.0 / 40);
  EXPECT_LE(r.p_value, 1.0);
  const double mean = std::accumulate(r.null_values.begin(), r.null_values.end(), 0.0) / 39;
  // Small forests on small n carry a slight positive bias.
  EXPECT_NEAR(mean, 0.0, 0.1);
}

TEST(PermutationTest, ThreadIndependent) {
  const auto data = sim::sample({SettingKind::Spherical, 0.5, 0.5, 2}, 300, 5);
  const auto a = permutation_test(data, small_config(8), 12, 6, 1);
  const auto b = permutation_test(data, small_config(8), 12, 6, 4);
  EXPECT_EQ(a.observed, b.observed);
  EXPECT_EQ(a.null_values, b.null_values);
  EXPECT_EQ(a.p_value, b.p_value);
}

TEST(PermutationTest, CustomStatisticAndErrors) {
  const auto data = sim::sample({SettingKind::Spherical, 1.0, 0.5, 1}, 200, 7);
  // Difference of class means: permutations shrink it.
  const MiStatistic gap = [](const LabeledDataset& d, std::uint64_t) {
    double s[2] = {}, c[2] = {};
    for (std::size_t i = 0; i < d.size(); ++i) {
      s[(*d.labels)[i]] += d.features(i, 0);
      ++c[(*d.labels)[i]];
    }
    return s[1] / c[1] - s[0] / c[0];
  };
  const auto r = permutation_test(data, gap, 49, 8, 1);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 50);
  EXPECT_THROW(permutation_test(data, gap, 0, 8, 1), ConfigError);
  auto unlabeled = data;
  unlabeled.labels.reset();
  EXPECT_THROW(permutation_test(unlabeled, gap, 5, 8, 1), InputError);
}

TEST(Decomposition, ChainRuleAndConventions) {
  const auto data = sim::sample({SettingKind::Elliptical, 1.0, 0.5, 4}, 900, 9);
  const std::vector<std::vector<std::string>> subsets{{"x1"}, {"x2", "x1"}, {"x1", "x2", "x3", "x4"}, {}, {"x4", "x3"}};
  const auto rows = mi_decomposition(data, subsets, small_config(), 10, 0);
  ASSERT_EQ(rows.size(), subsets.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].in_features, subsets[i]);
    EXPECT_EQ(rows[i].i_in + rows[i].i_cond, rows[i].i_total);
    EXPECT_EQ(rows[i].i_total, rows[0].i_total);
  }
  EXPECT_EQ(rows[2].i_in, rows[2].i_total);
  EXPECT_EQ(rows[2].i_cond, 0.0);
  EXPECT_EQ(rows[3].i_in, 0.0);
  EXPECT_EQ(rows[3].i_cond, rows[3].i_total);
  // Signal lives in x1; the noise pair carries almost nothing.
  EXPECT_GT(rows[0].i_in, rows[4].i_in + 0.1);
}

TEST(Decomposition, SubsetSpellingOrderIrrelevant) {
  const auto data = sim::sample({SettingKind::ThreeClass, 1.0, 1.0 / 3, 3}, 600, 11);
  const auto a = mi_decomposition(data, {{"x1", "x3"}}, small_config(), 12, 1);
  const auto b = mi_decomposition(data, {{"x3", "x1"}}, small_config(), 12, 1);
  EXPECT_EQ(a[0].i_in, b[0].i_in);
}

TEST(Decomposition, UnknownFeature) {
  const auto data = sim::sample({SettingKind::Spherical, 1.0, 0.5, 2}, 100, 13);
  EXPECT_THROW(mi_decomposition(data, {{"age"}}, small_config(), 1, 1), InputError);
}
