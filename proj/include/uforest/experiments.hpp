#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "uforest/baselines.hpp"
#include "uforest/forest.hpp"
#include "uforest/io.hpp"
#include "uforest/parallel.hpp"
#include "uforest/rng.hpp"
#include "uforest/sim.hpp"

namespace uforest::experiments {

/// Grid x trials x estimators over one simulation setting.
///
/// Trial t draws its data from seed (seed, t) at every grid point, so
/// trials are paired across the grid (a smaller n is a prefix of a larger
/// one). Estimators on a cell share the data and use the stream
/// (cell seed, 1).
struct SweepSpec {
  sim::SettingKind kind = sim::SettingKind::Spherical;
  std::vector<std::size_t> n_grid{6000};
  std::vector<std::size_t> d_grid{1};
  std::vector<double> mu_grid{1.0};
  std::vector<double> pi_grid{0.5};
  std::size_t trials = 1;
  std::vector<std::string> estimators{"uf"};
  std::uint64_t seed = 0;
  EstimatorOptions options{};
  bool timing = false;
};

struct GridPoint {
  std::size_t n, d;
  double mu, pi;
};

inline std::vector<GridPoint> grid_points(const SweepSpec& spec) {
  std::vector<GridPoint> pts;
  for (auto n : spec.n_grid)
    for (auto d : spec.d_grid)
      for (double mu : spec.mu_grid)
        for (double pi : spec.pi_grid) pts.push_back({n, d, mu, pi});
  return pts;
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) { return derive_seed(seed, trial); }

/// Rows in (grid point, trial, estimator) order. Cells run in parallel, each
/// single-threaded inside, so the output does not depend on the thread count.
inline std::vector<io::SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.trials == 0) throw ConfigError("sweep: trials must be >= 1");
  if (spec.estimators.empty()) throw ConfigError("sweep: no estimators");
  const auto points = grid_points(spec);
  if (points.empty()) throw ConfigError("sweep: empty grid");
  for (const auto& p : points) sim::SimSetting{spec.kind, p.mu, p.pi, p.d}.validate();
  const std::size_t per_cell = spec.estimators.size();
  std::vector<io::SweepRow> rows(points.size() * spec.trials * per_cell);
  EstimatorOptions inner = spec.options;
  inner.threads = 1;
  parallel_for(
      points.size() * spec.trials,
      [&](std::size_t cell) {
        const auto& p = points[cell / spec.trials];
        const std::uint64_t seed = trial_seed(spec.seed, cell % spec.trials);
        const sim::SimSetting setting{spec.kind, p.mu, p.pi, p.d};
        const auto data = sim::sample(setting, p.n, seed);
        for (std::size_t e = 0; e < per_cell; ++e) {
          const auto start = std::chrono::steady_clock::now();
          auto report = run_estimator(spec.estimators[e], data, inner, derive_seed(seed, 1));
          const std::chrono::duration<double, std::milli> took = std::chrono::steady_clock::now() - start;
          report.seed = seed;
          auto& row = rows[cell * per_cell + e] = io::SweepRow::from_report(report, p.mu, p.pi);
          if (spec.timing) row.wall_time_ms = took.count();
        }
      },
      spec.options.threads);
  return rows;
}

/// Forest flavours whose posterior can be profiled: cart, honest (no
/// correction), uf, irf.
inline std::vector<double> posterior_profile(const std::string& estimator, const LabeledDataset& data,
                                             const ForestConfig& base, std::uint64_t seed, std::span<const double> xs,
                                             std::size_t cls = 1, unsigned threads = 0) {
  if (data.dim() != 1) throw InputError("posterior_profile: one-dimensional data only");
  std::vector<double> out(xs.size());
  if (estimator == "irf") {
    const auto model = fit_isotonic_forest(data, base, seed, threads);
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = model.posterior({&xs[i], 1})[cls];
    return out;
  }
  ForestConfig c = base;
  if (estimator == "cart") {
    const ForestConfig plain = ForestConfig::cart();
    c.honest = plain.honest;
    c.correction = plain.correction;
    c.aggregation = plain.aggregation;
  } else if (estimator == "honest") {
    c.honest = true;
    c.correction = false;
  } else if (estimator == "uf") {
    c.honest = true;
    c.correction = true;
  } else {
    throw ConfigError("posterior_profile: unknown forest '" + estimator + "' (expected cart, honest, uf or irf)");
  }
  const auto forest = fit_forest(data, c, seed, threads);
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = forest.posterior({&xs[i], 1})[cls];
  return out;
}

/// Evenly spaced points from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return v;
}

struct ProfileSet {
  std::vector<double> xs;
  std::vector<std::string> estimators;
  std::vector<std::vector<std::vector<double>>> values;  // [estimator][trial][x]

  std::vector<double> mean(std::size_t e) const {
    std::vector<double> m(xs.size(), 0.0);
    for (const auto& t : values[e])
      for (std::size_t i = 0; i < xs.size(); ++i) m[i] += t[i];
    for (double& v : m) v /= static_cast<double>(values[e].size());
    return m;
  }

  /// Unbiased variance across trials at each x.
  std::vector<double> variance(std::size_t e) const {
    const auto m = mean(e);
    std::vector<double> v(xs.size(), 0.0);
    for (const auto& t : values[e])
      for (std::size_t i = 0; i < xs.size(); ++i) v[i] += (t[i] - m[i]) * (t[i] - m[i]);
    const double denom = values[e].size() > 1 ? static_cast<double>(values[e].size() - 1) : 1.0;
    for (double& x : v) x /= denom;
    return v;
  }
};

/// Posterior of the +1 class on an x grid, per forest flavour and trial, on
/// spherical data. Trials share data across flavours.
inline ProfileSet posterior_profiles(const sim::SimSetting& setting, std::size_t n, std::size_t trials,
                                     const std::vector<std::string>& estimators, const ForestConfig& base,
                                     std::uint64_t seed, std::vector<double> xs, unsigned threads = 0) {
  ProfileSet set{std::move(xs), estimators, {}};
  set.values.assign(estimators.size(), std::vector<std::vector<double>>(trials));
  parallel_for(
      trials * estimators.size(),
      [&](std::size_t job) {
        const std::size_t t = job / estimators.size(), e = job % estimators.size();
        const std::uint64_t s = trial_seed(seed, t);
        const auto data = sim::sample(setting, n, s);
        set.values[e][t] = posterior_profile(estimators[e], data, base, derive_seed(s, 1), set.xs, 1, 1);
      },
      threads);
  return set;
}

}  // namespace uforest::experiments
