#include "nirb/gpr.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nirb;

TEST(Gpr, InterpolatesTrainingDataWithTinyNoise) { EXPECT_LT(oracles::gp_interpolation(), 1e-3); }

TEST(Gpr, LogLikelihoodGradientMatchesFiniteDifferences) {
  Matrix x(6, 1), y(6, 2);
  for (int i = 0; i < 6; ++i) {
    x(i, 0) = 0.3 * i;
    y(i, 0) = std::sin(x(i, 0));
    y(i, 1) = x(i, 0) * x(i, 0);
  }
  Kernel k;
  k.sigma_f = 1.3;
  k.length_scale = 0.7;
  k.squared_distance = true;
  Vector grad;
  (void)log_marginal_likelihood(x, y, k, 1e-4, &grad);
  const double eps = 1e-6;
  for (int j = 0; j < 2; ++j) {
    Kernel kp = k, km = k;
    if (j == 0) {
      kp.sigma_f *= std::exp(eps);
      km.sigma_f *= std::exp(-eps);
    } else {
      kp.length_scale *= std::exp(eps);
      km.length_scale *= std::exp(-eps);
    }
    const double fd = (log_marginal_likelihood(x, y, kp, 1e-4) - log_marginal_likelihood(x, y, km, 1e-4)) / (2 * eps);
    EXPECT_NEAR(grad[j], fd, 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST(Gpr, LogLikelihoodOfASinglePointByHand) {
  Matrix x(1, 1), y(1, 1);
  x << 0.0;
  y << 2.0;
  Kernel k;
  k.sigma_f = 1.0;
  const double noise = 0.5;
  // N(2; 0, 1.5)
  const double expected = -0.5 * 4.0 / 1.5 - 0.5 * std::log(1.5) - 0.5 * std::log(2.0 * std::acos(-1.0));
  EXPECT_NEAR(log_marginal_likelihood(x, y, k, noise), expected, 1e-12);
}

TEST(Gpr, DotProductKernelReproducesAffineData) {
  Matrix x(5, 2), y(5, 1);
  for (int i = 0; i < 5; ++i) {
    x(i, 0) = i;
    x(i, 1) = i * i - 1.0;
    y(i, 0) = 1.0 + 2.0 * x(i, 0) - x(i, 1);
  }
  GprOptions o;
  o.kind = KernelKind::dot_product;
  o.noise_variance = 1e-10;
  const GprModel m = GprModel::fit(x, y, o);
  Vector probe(2);
  probe << 2.5, 7.0;
  EXPECT_NEAR(m.predict(probe).mean[0], 1.0 + 5.0 - 7.0, 1e-4);
}

TEST(Gpr, PredictiveVarianceVanishesAtTrainingInputs) {
  Matrix x(4, 1), y(4, 1);
  x << 0.0, 1.0, 2.0, 3.0;
  y << 0.0, 1.0, 0.0, -1.0;
  Kernel k;
  k.squared_distance = true;
  GprOptions o;
  o.noise_variance = 1e-10;
  const GprModel m = GprModel::condition(x, y, k, o);
  Vector at(1);
  at << 1.0;
  EXPECT_LT(m.predict(at).variance, 1e-6);
  at << 10.0;
  EXPECT_GT(m.predict(at).variance, 0.5);
}

TEST(Gpr, KernelNamesRoundTrip) {
  EXPECT_EQ(parse_kernel_kind("dot_product"), KernelKind::dot_product);
  EXPECT_EQ(parse_kernel_kind(kernel_kind_name(KernelKind::squared_exponential)), KernelKind::squared_exponential);
  EXPECT_THROW(parse_kernel_kind("matern"), ConfigError);
}

TEST(Gpr, NeedsTwoTrainingPairs) {
  EXPECT_THROW(GprModel::fit(Matrix::Ones(1, 2), Matrix::Ones(1, 1), {}), InvalidArgument);
}
