#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "uforest/dataset.hpp"
#include "uforest/error.hpp"
#include "uforest/forest.hpp"
#include "uforest/parallel.hpp"
#include "uforest/rng.hpp"

namespace uforest {

struct PermutationTestResult {
  double observed = 0.0;
  std::vector<double> null_values;
  double p_value = 1.0;
};

/// Mutual information of a labeled dataset under a given seed.
using MiStatistic = std::function<double(const LabeledDataset&, std::uint64_t seed)>;

inline MiStatistic forest_statistic(const ForestConfig& config, unsigned threads = 1) {
  return [config, threads](const LabeledDataset& data, std::uint64_t seed) {
    return estimate_mutual_information(data, config, seed, threads).mi;
  };
}

/// Add-one permutation p-value: (1 + #{null >= observed}) / (R + 1).
inline double permutation_p_value(double observed, std::span<const double> null_values) {
  const auto hits = std::ranges::count_if(null_values, [&](double v) { return v >= observed; });
  return (1.0 + static_cast<double>(hits)) / (static_cast<double>(null_values.size()) + 1.0);
}

/// Tests I(X;Y) > 0. Replicate r permutes the labels with the stream
/// (seed, 1, r) and re-estimates with (seed, 2, r); replicates run in parallel.
inline PermutationTestResult permutation_test(const LabeledDataset& data, const MiStatistic& statistic, std::size_t n_reps,
                                              std::uint64_t seed, unsigned threads = 0) {
  if (n_reps == 0) throw ConfigError("permutation test: n_reps must be >= 1");
  const auto& labels = data.require_labels();
  PermutationTestResult result;
  result.observed = statistic(data, derive_seed(seed, 0));
  result.null_values.assign(n_reps, 0.0);
  parallel_for(
      n_reps,
      [&](std::size_t r) {
        LabeledDataset shuffled = data;
        std::vector<ClassLabel> y = labels;
        CounterRng(derive_seed(seed, 1, r)).shuffle(std::span<ClassLabel>(y));
        shuffled.labels = std::move(y);
        result.null_values[r] = statistic(shuffled, derive_seed(seed, 2, r));
      },
      threads);
  result.p_value = permutation_p_value(result.observed, result.null_values);
  return result;
}

inline PermutationTestResult permutation_test(const LabeledDataset& data, const ForestConfig& config, std::size_t n_reps,
                                              std::uint64_t seed, unsigned threads = 0) {
  return permutation_test(data, forest_statistic(config), n_reps, seed, threads);
}

struct DecompositionRow {
  std::vector<std::string> in_features;
  double i_in = 0.0;
  double i_cond = 0.0;
  double i_total = 0.0;
  double h_y = 0.0;  // for normalized views
};

/// Chain-rule split of I(Y;X) into I(Y;X_in) and I(Y;X_out | X_in), the
/// latter defined as the difference. All estimates share `seed`; columns
/// keep their dataset order, so a subset's spelling order does not matter.
inline std::vector<DecompositionRow> mi_decomposition(const LabeledDataset& data,
                                                      const std::vector<std::vector<std::string>>& in_subsets,
                                                      const ForestConfig& config, std::uint64_t seed, unsigned threads = 0) {
  std::vector<std::vector<std::size_t>> columns;
  for (const auto& subset : in_subsets) {
    std::set<std::size_t> idx;
    for (const auto& name : subset) idx.insert(data.feature_index(name));
    columns.emplace_back(idx.begin(), idx.end());
  }
  const EstimateReport total = estimate_mutual_information(data, config, seed, threads);
  std::vector<DecompositionRow> rows;
  for (std::size_t s = 0; s < in_subsets.size(); ++s) {
    DecompositionRow row{in_subsets[s], 0.0, 0.0, total.mi, total.h_y};
    if (columns[s].size() == data.dim()) {
      row.i_in = total.mi;
    } else if (!columns[s].empty()) {
      row.i_in = estimate_mutual_information(data.select_features(columns[s]), config, seed, threads).mi;
    }
    row.i_cond = row.i_total - row.i_in;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace uforest
