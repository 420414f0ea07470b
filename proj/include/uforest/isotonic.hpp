#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "uforest/error.hpp"

namespace uforest {

/// Non-decreasing step function fitted by pool-adjacent-violators.
///
/// Block i covers raw scores from lower[i] up to the next block's lower
/// bound and maps them to values[i]. Scores below the first block map to
/// the first value.
class CalibrationMap {
 public:
  CalibrationMap() = default;
  CalibrationMap(std::vector<double> lower, std::vector<double> values) : lower_(std::move(lower)), values_(std::move(values)) {
    if (lower_.empty() || lower_.size() != values_.size()) throw InputError("calibration map: bad block layout");
  }

  /// Least-squares isotonic fit of `targets` on `scores`. Equal scores are
  /// pooled before the violator pass, so the map is a function of the score.
  static CalibrationMap fit(std::span<const double> scores, std::span<const double> targets) {
    if (scores.empty() || scores.size() != targets.size()) throw InputError("isotonic fit: need matching nonempty inputs");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    struct Block {
      double lower, sum, weight;
      double mean() const { return sum / weight; }
    };
    std::vector<Block> blocks;
    for (std::size_t idx : order) {
      if (!blocks.empty() && blocks.back().lower == scores[idx]) {
        blocks.back().sum += targets[idx];
        blocks.back().weight += 1.0;
      } else {
        blocks.push_back({scores[idx], targets[idx], 1.0});
      }
      while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() >= blocks.back().mean()) {
        const Block top = blocks.back();
        blocks.pop_back();
        blocks.back().sum += top.sum;
        blocks.back().weight += top.weight;
      }
    }
    std::vector<double> lower, values;
    for (const auto& b : blocks) {
      lower.push_back(b.lower);
      values.push_back(std::clamp(b.mean(), 0.0, 1.0));
    }
    return {std::move(lower), std::move(values)};
  }

  double operator()(double score) const noexcept {
    const auto it = std::ranges::upper_bound(lower_, score);
    const std::size_t i = it == lower_.begin() ? 0 : static_cast<std::size_t>(it - lower_.begin()) - 1;
    return values_[i];
  }

  std::span<const double> lower() const noexcept { return lower_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> lower_;
  std::vector<double> values_;
};

}  // namespace uforest
