// Estimate H(Y|X) and I(X;Y) on a simulated two-class Gaussian mixture and
// compare with the quadrature truth.

#include <cstdio>

#include "uforest/uforest.hpp"

int main() {
  using namespace uforest;
  const sim::SimSetting setting{sim::SettingKind::Spherical, 1.0, 0.5, 1};
  const auto data = sim::sample(setting, 3000, 42);

  ForestConfig config;  // B = 300, k = 1, kappa = 3, 0.4 / 0.3 / 0.3
  const auto report = estimate_mutual_information(data, config, 7);
  const auto truth = sim::truth(setting);

  std::printf("H(Y|X): estimate %.4f  truth %.4f\n", report.h_y_given_x, truth.h_y_given_x);
  std::printf("I(X;Y): estimate %.4f  truth %.4f\n", report.mi, truth.mi);

  const auto forest = fit_forest(data, config, 7);
  for (double x : {-2.0, 0.0, 2.0}) {
    const auto p = forest.posterior(std::span<const double>(&x, 1));
    std::printf("p(y=+1 | x=%+.1f) = %.3f\n", x, p[1]);
  }
}
