#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "uforest/dataset.hpp"
#include "uforest/entropy.hpp"
#include "uforest/error.hpp"
#include "uforest/forest.hpp"
#include "uforest/isotonic.hpp"
#include "uforest/knn.hpp"
#include "uforest/parallel.hpp"
#include "uforest/rng.hpp"

namespace uforest {

struct KsgOptions {
  std::size_t k = 3;
  /// Half-width of the uniform jitter added when the joint sample has exact
  /// duplicates (zero k-NN distance). Zero disables it.
  double jitter = 1e-10;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

namespace detail {

inline FeatureMatrix column(std::span<const double> y) { return FeatureMatrix(y.size(), 1, std::vector<double>(y.begin(), y.end())); }

inline FeatureMatrix join(const FeatureMatrix& x, std::span<const double> y) {
  FeatureMatrix z(x.rows(), x.cols() + 1);
  std::vector<double> v;
  v.reserve(x.rows() * (x.cols() + 1));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    v.insert(v.end(), r.begin(), r.end());
    v.push_back(y[i]);
  }
  return FeatureMatrix(x.rows(), x.cols() + 1, std::move(v));
}

// Sum in sorted order so the result does not depend on sample order.
inline double sorted_mean(std::vector<double> terms) {
  std::ranges::sort(terms);
  double s = 0.0;
  for (double t : terms) s += t;
  return s / static_cast<double>(terms.size());
}

inline void check_knn_input(const FeatureMatrix& x, std::span<const double> y, std::size_t k) {
  if (x.rows() != y.size()) throw InputError("ksg: x and y lengths differ");
  if (k == 0 || x.rows() <= k) throw InputError("ksg: need n > k >= 1");
  if (x.cols() == 0) throw InputError("ksg: x has no columns");
}

inline std::vector<double> kth_distances(const KnnIndex& joint, std::size_t k, unsigned threads) {
  std::vector<double> eps(joint.size());
  parallel_for(
      joint.size(), [&](std::size_t i) { eps[i] = joint.knn(joint.points().row(i), k, i).back().distance; }, threads);
  return eps;
}

}  // namespace detail

/// Kraskov et al. estimator 1 under the max-norm:
/// psi(k) + psi(n) - <psi(n_x + 1) + psi(n_y + 1)>, with n_x, n_y counted
/// in open balls of the joint k-th neighbour distance. y is treated as real.
inline double ksg_mi(const FeatureMatrix& x, std::span<const double> y, const KsgOptions& opt = {}) {
  detail::check_knn_input(x, y, opt.k);
  const std::size_t n = x.rows();
  FeatureMatrix xs = x;
  std::vector<double> ys(y.begin(), y.end());
  std::vector<double> eps = detail::kth_distances(KnnIndex(detail::join(xs, ys)), opt.k, opt.threads);

  if (std::ranges::any_of(eps, [](double e) { return e == 0.0; })) {
    if (!(opt.jitter > 0.0)) throw InputError("ksg: duplicate points and jitter disabled");
    CounterRng rng(derive_seed(opt.seed, 0x5a17));
    std::vector<double> v(xs.values().begin(), xs.values().end());
    for (double& e : v) e += opt.jitter * (2.0 * rng.uniform() - 1.0);
    for (double& e : ys) e += opt.jitter * (2.0 * rng.uniform() - 1.0);
    xs = FeatureMatrix(n, x.cols(), std::move(v));
    eps = detail::kth_distances(KnnIndex(detail::join(xs, ys)), opt.k, opt.threads);
  }

  const KnnIndex ix(xs);
  const KnnIndex iy(detail::column(ys));
  std::vector<double> terms(n);
  parallel_for(
      n,
      [&](std::size_t i) {
        const std::size_t nx = ix.count_within(xs.row(i), eps[i], true) - 1;
        const std::size_t ny = iy.count_within(std::span<const double>(&ys[i], 1), eps[i], true) - 1;
        terms[i] = digamma(static_cast<double>(nx) + 1.0) + digamma(static_cast<double>(ny) + 1.0);
      },
      opt.threads);
  return digamma(static_cast<double>(opt.k)) + digamma(static_cast<double>(n)) - detail::sorted_mean(std::move(terms));
}

/// Gao et al. mixed estimator. Where the joint k-th neighbour distance is
/// zero, k is replaced by the number of exact copies of the point and the
/// marginal counts use closed zero-radius balls; elsewhere it is the KSG
/// term. Counts include the point itself. psi(n) is used in place of
/// log(n) so that, without ties, the value equals ksg_mi.
inline double mixed_ksg_mi(const FeatureMatrix& x, std::span<const double> y, std::size_t k = 3, unsigned threads = 0) {
  detail::check_knn_input(x, y, k);
  const std::size_t n = x.rows();
  const KnnIndex joint(detail::join(x, y));
  const std::vector<double> rho = detail::kth_distances(joint, k, threads);
  const KnnIndex ix(x);
  const KnnIndex iy(detail::column(y));
  std::vector<double> terms(n);
  parallel_for(
      n,
      [&](std::size_t i) {
        const auto yi = std::span<const double>(&y[i], 1);
        double kk = static_cast<double>(k);
        std::size_t nx, ny;
        if (rho[i] == 0.0) {
          kk = static_cast<double>(joint.count_within(joint.points().row(i), 0.0, false));
          nx = ix.count_within(x.row(i), 0.0, false);
          ny = iy.count_within(yi, 0.0, false);
        } else {
          nx = ix.count_within(x.row(i), rho[i], true);
          ny = iy.count_within(yi, rho[i], true);
        }
        terms[i] = digamma(kk) - digamma(static_cast<double>(nx)) - digamma(static_cast<double>(ny));
      },
      threads);
  return digamma(static_cast<double>(n)) + detail::sorted_mean(std::move(terms));
}

inline std::vector<double> labels_as_reals(std::span<const ClassLabel> labels) {
  return {labels.begin(), labels.end()};
}

/// CART forest whose class scores are recalibrated per class by isotonic
/// maps fitted on held-out rows; calibrated rows are renormalized.
struct IsotonicForest {
  UncertaintyForest forest;
  std::vector<CalibrationMap> maps;  // one per class
  std::vector<std::size_t> eval_rows;

  std::vector<double> posterior(std::span<const double> x) const {
    std::vector<double> p = forest.posterior(x);
    calibrate(p);
    return p;
  }

  void calibrate(std::span<double> p) const {
    double total = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) total += p[c] = maps[c](p[c]);
    if (total > 0.0) {
      for (double& v : p) v /= total;
    } else {
      std::ranges::fill(p, 1.0 / static_cast<double>(p.size()));
    }
  }
};

/// Splits rows into train / calibration / evaluation parts by the config's
/// partition / vote / eval fractions, fits a plain CART forest on the train
/// part (each tree sees the same share of it that a tree of `config` sees of
/// the full data) and isotonic maps on the calibration part.
inline IsotonicForest fit_isotonic_forest(const LabeledDataset& data, const ForestConfig& config, std::uint64_t seed,
                                          unsigned threads = 0) {
  config.validate();
  const auto& y = data.require_labels();
  const std::size_t n = data.size();
  const std::size_t n_train = static_cast<std::size_t>(std::llround(config.frac_partition * static_cast<double>(n)));
  const std::size_t n_cal = static_cast<std::size_t>(std::llround(config.frac_vote * static_cast<double>(n)));
  if (n_train == 0 || n_cal == 0 || n_train + n_cal >= n) throw FitError("irf: too few rows for train/calibration/eval splits");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng(derive_seed(seed, 0x1f)).shuffle(std::span<std::size_t>(order));
  const std::span<const std::size_t> train(order.data(), n_train);
  const std::span<const std::size_t> cal(order.data() + n_train, n_cal);

  ForestConfig cart = ForestConfig::cart();
  cart.n_trees = config.n_trees;
  cart.tree_params = config.tree_params;
  cart.eval_mode = EvalMode::ForestLevel;
  cart.frac_partition = 1.0;
  cart.frac_vote = 0.0;
  cart.frac_eval = 0.0;
  cart.subsample_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround((1.0 - config.frac_eval) * static_cast<double>(n_train))));

  const LabeledDataset train_set = data.select_rows(train);
  IsotonicForest model{fit_forest(train_set, cart, derive_seed(seed, 1), threads), {}, {}};
  const std::size_t k = data.num_classes();

  std::vector<double> scores(n_cal * k);
  parallel_for(
      n_cal, [&](std::size_t i) { model.forest.accumulate_posterior(data.features.row(cal[i]), {scores.data() + i * k, k}); },
      threads);
  std::vector<double> s(n_cal), t(n_cal);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < n_cal; ++i) {
      s[i] = scores[i * k + c];
      t[i] = y[cal[i]] == static_cast<ClassLabel>(c) ? 1.0 : 0.0;
    }
    model.maps.push_back(CalibrationMap::fit(s, t));
  }
  model.eval_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_cal), order.end());
  return model;
}

inline EstimateReport irf_estimate(const LabeledDataset& data, const ForestConfig& config, std::uint64_t seed,
                                   unsigned threads = 0) {
  const IsotonicForest model = fit_isotonic_forest(data, config, seed, threads);
  const std::size_t k = data.num_classes();
  std::vector<double> values(model.eval_rows.size());
  parallel_for(
      values.size(),
      [&](std::size_t i) {
        std::vector<double> p(k);
        model.forest.accumulate_posterior(data.features.row(model.eval_rows[i]), p);
        model.calibrate(p);
        values[i] = entropy(p);
      },
      threads);
  EstimateReport report;
  report.estimator = "irf";
  report.config = config;
  report.seed = seed;
  report.n = data.size();
  report.d = data.dim();
  double total = 0.0;
  for (double v : values) total += v;
  report.h_y_given_x = total / static_cast<double>(values.size());
  report.h_y = empirical_entropy(*data.labels);
  finish_mutual_information(report);
  return report;
}

/// Estimator names accepted by `run_estimator`.
inline const std::vector<std::string>& estimator_names() {
  static const std::vector<std::string> names{"uf", "cart", "irf", "ksg", "mixed-ksg"};
  return names;
}

struct EstimatorOptions {
  ForestConfig forest{};
  std::size_t knn_k = 3;
  double jitter = 1e-10;
  unsigned threads = 0;
};

/// Runs one named estimator. "cart" keeps the tree count, tree parameters,
/// fractions and subsample size of `opt.forest` and switches off honesty
/// and correction.
inline EstimateReport run_estimator(const std::string& name, const LabeledDataset& data, const EstimatorOptions& opt,
                                    std::uint64_t seed) {
  const auto& y = data.require_labels();
  if (name == "uf") return estimate_mutual_information(data, opt.forest, seed, opt.threads);
  if (name == "cart") {
    ForestConfig c = ForestConfig::cart();
    c.n_trees = opt.forest.n_trees;
    c.tree_params = opt.forest.tree_params;
    c.frac_partition = opt.forest.frac_partition;
    c.frac_vote = opt.forest.frac_vote;
    c.frac_eval = opt.forest.frac_eval;
    c.eval_mode = opt.forest.eval_mode;
    c.subsample_size = opt.forest.subsample_size;
    return estimate_mutual_information(data, c, seed, opt.threads);
  }
  if (name == "irf") return irf_estimate(data, opt.forest, seed, opt.threads);
  if (name == "ksg" || name == "mixed-ksg") {
    const std::vector<double> yr = labels_as_reals(y);
    EstimateReport r;
    r.estimator = name;
    r.seed = seed;
    r.n = data.size();
    r.d = data.dim();
    r.h_y = empirical_entropy(y);
    const double mi = name == "ksg" ? ksg_mi(data.features, yr, {opt.knn_k, opt.jitter, seed, opt.threads})
                                    : mixed_ksg_mi(data.features, yr, opt.knn_k, opt.threads);
    r.h_y_given_x = r.h_y - mi;
    finish_mutual_information(r);
    return r;
  }
  throw ConfigError("unknown estimator '" + name + "' (expected uf, cart, irf, ksg or mixed-ksg)");
}

}  // namespace uforest
