#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "uforest/dataset.hpp"
#include "uforest/error.hpp"

namespace uforest {

/// Shannon entropy in nats of a probability vector; zero entries contribute 0.
inline double entropy(std::span<const double> probs) noexcept {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

/// Entropy of the distribution proportional to non-negative counts.
inline double entropy_of_counts(std::span<const std::size_t> counts) noexcept {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return 0.0;
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (auto c : counts)
    if (c > 0) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log(p);
    }
  return h;
}

/// Plug-in entropy of the empirical label frequencies.
inline double empirical_entropy(std::span<const ClassLabel> labels) {
  if (labels.empty()) throw InputError("empirical_entropy: empty label vector");
  ClassLabel max_label = 0;
  for (ClassLabel y : labels) {
    if (y < 0) throw InputError("empirical_entropy: negative label code");
    max_label = std::max(max_label, y);
  }
  return entropy_of_counts(class_counts(labels, static_cast<std::size_t>(max_label) + 1));
}

/// Digamma function for x > 0: upward recurrence to x >= 10, then the
/// asymptotic series. Absolute error below 1e-13 on the positive axis.
inline double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli-number series: 1/12, 1/120, 1/252, 1/240, 1/132, 691/32760, 1/12
  const double series =
      inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12.0))))));
  return result + std::log(x) - 0.5 * inv - series;
}

}  // namespace uforest
