#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>

namespace uforest::quadrature {

namespace detail {

// Gauss-Kronrod 7/15 nodes on [-1, 1] (non-negative half) and weights.
inline constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161993302763, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
  double value;
  double error;
};

// One 15-point Kronrod panel with the QUADPACK error estimate, which
// includes a floor for the rounding error of the panel sum.
template <typename F>
Estimate gauss_kronrod(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> fv{};
  fv[7] = f(center);
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    fv[j] = f(center - dx);
    fv[14 - j] = f(center + dx);
  }
  double kronrod = fv[7] * kKronrodWeights[7];
  double gauss = fv[7] * kGaussWeights[3];
  double abs_sum = std::abs(fv[7]) * kKronrodWeights[7];
  for (std::size_t j = 0; j < 7; ++j) {
    const double sum = fv[j] + fv[14 - j];
    kronrod += kKronrodWeights[j] * sum;
    abs_sum += kKronrodWeights[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(fv[7] - mean);
  for (std::size_t j = 0; j < 7; ++j) asc += kKronrodWeights[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));

  const double result_abs = abs_sum * std::abs(half);
  const double result_asc = asc * std::abs(half);
  double error = std::abs((kronrod - gauss) * half);
  if (result_asc != 0.0 && error != 0.0) error = result_asc * std::min(1.0, std::pow(200.0 * error / result_asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (result_abs > std::numeric_limits<double>::min() / (50.0 * eps)) error = std::max(50.0 * eps * result_abs, error);
  return {kronrod * half, error};
}

struct Interval {
  double a, b;
  Estimate est;
  bool operator<(const Interval& o) const noexcept { return est.error < o.est.error; }
};

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integral of f over [a, b]: the
/// interval with the largest error estimate is bisected until the summed
/// error is below max(tol, rel_tol * |integral|) or `max_intervals` is reached.
template <typename F>
double integrate(F&& f, double a, double b, double tol = 1e-12, double rel_tol = 1e-12,
                 std::size_t max_intervals = 2000) {
  std::priority_queue<detail::Interval> heap;
  const auto whole = detail::gauss_kronrod(f, a, b);
  heap.push({a, b, whole});
  double error = whole.error;
  double value = whole.value;
  while (error > std::max(tol, rel_tol * std::abs(value)) && heap.size() < max_intervals) {
    const detail::Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gauss_kronrod(f, worst.a, mid);
    const auto right = detail::gauss_kronrod(f, mid, worst.b);
    error += left.error + right.error - worst.est.error;
    value += left.value + right.value - worst.est.value;
    heap.push({worst.a, mid, left});
    heap.push({mid, worst.b, right});
  }
  // Re-sum the final intervals to drop the drift of the running total.
  double total = 0.0;
  for (; !heap.empty(); heap.pop()) total += heap.top().est.value;
  return total;
}

}  // namespace uforest::quadrature
