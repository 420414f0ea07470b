#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "uforest/dataset.hpp"
#include "uforest/error.hpp"
#include "uforest/quadrature.hpp"
#include "uforest/rng.hpp"

namespace uforest::sim {

enum class SettingKind { Spherical, Elliptical, ThreeClass };

inline std::string to_string(SettingKind kind) {
  switch (kind) {
    case SettingKind::Spherical: return "spherical";
    case SettingKind::Elliptical: return "elliptical";
    case SettingKind::ThreeClass: return "three-class";
  }
  return "?";
}

inline SettingKind parse_setting_kind(const std::string& name) {
  if (name == "spherical") return SettingKind::Spherical;
  if (name == "elliptical") return SettingKind::Elliptical;
  if (name == "three-class" || name == "threeclass" || name == "three_class") return SettingKind::ThreeClass;
  throw ConfigError("unknown setting '" + name + "' (expected spherical, elliptical or three-class)");
}

/// One of the Gaussian-mixture simulation settings, padded with noise
/// dimensions up to `d`.
struct SimSetting {
  SettingKind kind = SettingKind::Spherical;
  double mu = 1.0;
  double pi = 0.5;
  std::size_t d = 1;

  /// Number of leading dimensions that carry class signal.
  std::size_t base_dim() const noexcept { return kind == SettingKind::Spherical ? 1 : 2; }
  std::size_t num_classes() const noexcept { return kind == SettingKind::ThreeClass ? 3 : 2; }

  void validate() const {
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw ConfigError("setting: mu must be finite and >= 0");
    if (!(pi > 0.0 && pi < 1.0)) throw ConfigError("setting: pi must lie strictly inside (0, 1)");
    if (d < base_dim())
      throw ConfigError("setting: " + to_string(kind) + " requires d >= " + std::to_string(base_dim()));
  }
};

/// Diagonal Gaussian class-conditional component over the signal dimensions.
struct ClassComponent {
  double prior;
  std::vector<double> mean;
  std::vector<double> sd;
};

/// Class components in label-code order. Two-class settings use code 0 for
/// y = -1 and code 1 for y = +1 (drawn with probability pi).
inline std::vector<ClassComponent> components(const SimSetting& s) {
  s.validate();
  switch (s.kind) {
    case SettingKind::Spherical:
      return {{1.0 - s.pi, {-s.mu}, {1.0}}, {s.pi, {s.mu}, {1.0}}};
    case SettingKind::Elliptical:
      return {{1.0 - s.pi, {-s.mu, 0.0}, {std::sqrt(3.0), 1.0}}, {s.pi, {s.mu, 0.0}, {1.0, 1.0}}};
    case SettingKind::ThreeClass: {
      const double rest = 0.5 * (1.0 - s.pi);
      return {{s.pi, {0.0, s.mu}, {1.0, 1.0}}, {rest, {s.mu, 0.0}, {1.0, 1.0}}, {rest, {-s.mu, 0.0}, {1.0, 1.0}}};
    }
  }
  return {};
}

inline std::vector<std::string> label_names(const SimSetting& s) {
  if (s.kind == SettingKind::ThreeClass) return {"0", "1", "2"};
  return {"-1", "+1"};
}

/// Draws n rows. Row i uses its own stream derived from (seed, i), so a
/// larger n never changes earlier rows.
inline LabeledDataset sample(const SimSetting& setting, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("sample: n must be >= 1");
  const auto comps = components(setting);
  const std::size_t d = setting.d;
  const std::size_t base = setting.base_dim();

  LabeledDataset out;
  out.features = FeatureMatrix(n, d);
  out.labels = std::vector<ClassLabel>(n);
  out.label_names = label_names(setting);
  out.feature_names.reserve(d);
  for (std::size_t j = 0; j < d; ++j) out.feature_names.push_back("x" + std::to_string(j + 1));

  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(derive_seed(seed, i));
    const double u = rng.uniform();
    std::size_t k = 0;
    double cumulative = comps[0].prior;
    while (k + 1 < comps.size() && u >= cumulative) cumulative += comps[++k].prior;
    (*out.labels)[i] = static_cast<ClassLabel>(k);
    auto row = out.features.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double z = rng.normal();
      row[j] = j < base ? comps[k].mean[j] + comps[k].sd[j] * z : z;
    }
  }
  return out;
}

/// Log of the class-k joint density pi_k * N(x; mean_k, diag(sd_k^2)) over the signal dims.
inline double log_joint(const ClassComponent& c, std::span<const double> x) {
  double acc = std::log(c.prior);
  for (std::size_t j = 0; j < c.mean.size(); ++j) {
    const double z = (x[j] - c.mean[j]) / c.sd[j];
    acc += -0.5 * z * z - std::log(c.sd[j]) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return acc;
}

/// Analytic class posterior p(. | x); x needs at least the signal dimensions.
inline std::vector<double> posterior(const SimSetting& setting, std::span<const double> x) {
  const auto comps = components(setting);
  if (x.size() < setting.base_dim()) throw InputError("posterior: point has too few dimensions");
  std::vector<double> logs(comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k) logs[k] = log_joint(comps[k], x);
  const double top = *std::ranges::max_element(logs);
  double total = 0.0;
  for (double& l : logs) total += (l = std::exp(l - top));
  for (double& l : logs) l /= total;
  return logs;
}

struct TruthValues {
  double h_y = 0.0;
  double h_y_given_x = 0.0;
  double mi = 0.0;
  double mi_normalized = 0.0;
};

namespace detail {

// -log p(k | x) = logsumexp_j a_j(x) - a_k(x), evaluated without cancellation.
inline double neg_log_posterior(const std::vector<ClassComponent>& comps, std::size_t k, std::span<const double> x) {
  const double own = log_joint(comps[k], x);
  double sum = 0.0;
  for (std::size_t j = 0; j < comps.size(); ++j)
    if (j != k) sum += std::exp(log_joint(comps[j], x) - own);
  return std::log1p(sum);
}

inline constexpr double kHalfWidth = 14.0;  // standard deviations; phi(14) ~ 1e-43
inline constexpr double kTolerance = 1e-12;

inline double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace detail

/// Ground-truth entropies of a setting by adaptive Gauss-Kronrod quadrature
/// of the analytic posterior over the signal dimensions. Noise dimensions do
/// not enter, so the result is identical for every padding d.
inline TruthValues truth(const SimSetting& setting) {
  const auto comps = components(setting);
  const std::size_t base = setting.base_dim();
  const double w = detail::kHalfWidth;

  TruthValues t;
  for (const auto& c : comps) t.h_y -= c.prior * std::log(c.prior);

  // H(Y|X) = sum_k pi_k E_{X ~ class k}[-log p(k | X)], each expectation
  // integrated in standardized coordinates of that class.
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const auto& c = comps[k];
    double expectation = 0.0;
    if (base == 1) {
      std::array<double, 1> x{};
      expectation = quadrature::integrate(
          [&](double z) {
            x[0] = c.mean[0] + c.sd[0] * z;
            return detail::neg_log_posterior(comps, k, x) * detail::std_normal_pdf(z);
          },
          -w, w, detail::kTolerance);
    } else {
      std::array<double, 2> x{};
      expectation = quadrature::integrate(
          [&](double z1) {
            const double inner = quadrature::integrate(
                [&](double z2) {
                  x[0] = c.mean[0] + c.sd[0] * z1;
                  x[1] = c.mean[1] + c.sd[1] * z2;
                  return detail::neg_log_posterior(comps, k, x) * detail::std_normal_pdf(z2);
                },
                -w, w, detail::kTolerance);
            return inner * detail::std_normal_pdf(z1);
          },
          -w, w, detail::kTolerance);
    }
    t.h_y_given_x += c.prior * expectation;
  }
  t.h_y_given_x = std::clamp(t.h_y_given_x, 0.0, t.h_y);
  t.mi = t.h_y - t.h_y_given_x;
  t.mi_normalized = t.h_y > 0.0 ? t.mi / t.h_y : 0.0;
  return t;
}

}  // namespace uforest::sim
