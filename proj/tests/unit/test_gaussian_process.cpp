#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "scout/error.hpp"
#include "scout/gaussian_process.hpp"
#include "scout/random.hpp"

namespace scout {
namespace {

TEST(Matern52, ValueAtZeroAndHandPoint) {
  EXPECT_DOUBLE_EQ(matern52(0.0, 1.3, 2.5), 2.5);
  const double s5 = std::sqrt(5.0);
  EXPECT_NEAR(matern52(2.0, 2.0, 1.0), (1 + s5 + 5.0 / 3.0) * std::exp(-s5), 1e-15);
  EXPECT_NEAR(matern52(1.0, 2.0, 3.0), 3.0 * (1 + s5 / 2 + 5.0 / 12.0) * std::exp(-s5 / 2), 1e-15);
}

TEST(Matern52, StrictlyDecreasing) {
  for (double l : kLengthscaleGrid) {
    double prev = matern52(0.0, l, 1.7);
    for (int i = 1; i <= 100; ++i) {
      const double k = matern52(0.05 * i * l, l, 1.7);
      EXPECT_LT(k, prev);
      EXPECT_GT(k, 0.0);
      prev = k;
    }
  }
}

struct Data {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Data random_data(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Data out{Eigen::MatrixXd(n, d), Eigen::VectorXd(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) out.x(i, k) = rng.uniform(-2, 2);
    out.y(i) = std::sin(out.x(i, 0)) + 0.3 * out.x.row(i).squaredNorm() + rng.uniform(0, 0.1);
  }
  return out;
}

TEST(GaussianProcess, InterpolatesTrainingPoints) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Data d = random_data(15, 3, seed);
    const GaussianProcess gp = GaussianProcess::fit(d.x, d.y);
    const double best = d.y.minCoeff();
    for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
      const auto p = gp.predict(d.x.row(i).transpose());
      EXPECT_NEAR(p.mean, d.y(i), 1e-4);
      EXPECT_LE(expected_improvement(p.mean, p.stddev, best), 1e-6);
    }
  }
}

TEST(GaussianProcess, PriorFarAway) {
  const Data d = random_data(6, 2, 3);
  const GaussianProcess gp(d.x, d.y, 0.3);
  const double mean = d.y.mean();
  const double var = (d.y.array() - mean).square().sum() / 5.0;
  EXPECT_NEAR(gp.variance(), var, 1e-12);
  const auto p = gp.predict(Eigen::VectorXd::Constant(2, 100.0));
  EXPECT_NEAR(p.mean, mean, 1e-9);
  EXPECT_NEAR(p.stddev, std::sqrt(var - kDefaultJitter), 1e-9);
}

TEST(GaussianProcess, LogMarginalLikelihoodTwoPoints) {
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 1.0;
  Eigen::VectorXd y(2);
  y << 1.0, 3.0;
  const double l = 1.0;
  const GaussianProcess gp(x, y, l);
  // Centered targets (-1, 1), sigma^2 = 2.
  const double s2 = 2.0, k01 = matern52(1.0, l, s2), a = s2 + kDefaultJitter;
  const double det = a * a - k01 * k01;
  const double quad = (a * 1 + 2 * k01 * 1 + a * 1) / det;  // c^T K^-1 c with c = (-1, 1)
  const double want = -0.5 * quad - 0.5 * std::log(det) - std::log(2 * std::numbers::pi);
  EXPECT_NEAR(gp.log_marginal_likelihood(), want, 1e-9);
}

TEST(GaussianProcess, FitPicksBestLengthscale) {
  const Data d = random_data(12, 2, 9);
  const GaussianProcess gp = GaussianProcess::fit(d.x, d.y);
  double best = -1e300, arg = 0.0;
  for (double l : kLengthscaleGrid) {
    const double lml = GaussianProcess(d.x, d.y, l).log_marginal_likelihood();
    if (lml > best) {
      best = lml;
      arg = l;
    }
  }
  EXPECT_EQ(gp.lengthscale(), arg);
}

TEST(GaussianProcess, ConstantTargetsStayFinite) {
  Eigen::MatrixXd x(3, 1);
  x << 0, 1, 2;
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(3, 4.0);
  const GaussianProcess gp = GaussianProcess::fit(x, y);
  const auto p = gp.predict(Eigen::VectorXd::Constant(1, 0.5));
  EXPECT_NEAR(p.mean, 4.0, 1e-9);
  EXPECT_TRUE(std::isfinite(p.stddev));
}

TEST(GaussianProcess, BadInputs) {
  EXPECT_THROW(GaussianProcess(Eigen::MatrixXd(1, 1), Eigen::VectorXd(1), 1.0), Error);
  EXPECT_THROW(GaussianProcess(Eigen::MatrixXd::Zero(2, 1), Eigen::VectorXd(3), 1.0), Error);
  EXPECT_THROW(GaussianProcess(Eigen::MatrixXd::Zero(2, 1), Eigen::VectorXd::Zero(2), 0.0), Error);
}

TEST(ExpectedImprovement, ClosedForm) {
  EXPECT_NEAR(expected_improvement(0.0, 1.0, 0.0), 1.0 / std::sqrt(2 * std::numbers::pi), 1e-15);
  EXPECT_EQ(expected_improvement(1.0, 0.0, 3.0), 2.0);
  EXPECT_EQ(expected_improvement(3.0, 0.0, 1.0), 0.0);
  // mean 1, sd 2, best 2: z = 0.5.
  const double z = 0.5;
  const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
  const double pdf = std::exp(-z * z / 2) / std::sqrt(2 * std::numbers::pi);
  EXPECT_NEAR(expected_improvement(1.0, 2.0, 2.0), 1.0 * cdf + 2.0 * pdf, 1e-15);
}

TEST(ExpectedImprovement, NonNegativeAndMonotone) {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double m = rng.uniform(-3, 3), s = rng.uniform(0, 2), b = rng.uniform(-3, 3);
    const double ei = expected_improvement(m, s, b);
    EXPECT_GE(ei, 0.0);
    EXPECT_GE(ei, std::max(0.0, b - m) - 1e-12);
    EXPECT_GE(expected_improvement(m, s + 0.1, b), ei - 1e-12);
  }
}

}  // namespace
}  // namespace scout
