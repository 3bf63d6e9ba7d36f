#include "scout/gaussian_process.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "scout/error.hpp"

namespace scout {

double matern52(double r, double lengthscale, double variance) {
  const double s = std::sqrt(5.0) * r / lengthscale;
  return variance * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

GaussianProcess::GaussianProcess(Eigen::MatrixXd inputs, Eigen::VectorXd targets,
                                 double lengthscale, double jitter)
    : inputs_(std::move(inputs)), lengthscale_(lengthscale), jitter_(jitter) {
  const Eigen::Index n = inputs_.rows();
  if (n < 2 || targets.size() != n)
    throw Error(ErrorCode::kInvalidArgument, "GP needs at least two matching observations");
  if (!(lengthscale > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lengthscale must be > 0");

  mean_ = targets.mean();
  const Eigen::VectorXd centered = targets.array() - mean_;
  variance_ = std::max(centered.squaredNorm() / static_cast<double>(n - 1), 1e-12);

  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = variance_ + jitter_;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = (inputs_.row(i) - inputs_.row(j)).norm();
      k(i, j) = k(j, i) = matern52(r, lengthscale_, variance_);
    }
  }
  llt_.compute(k);
  if (llt_.info() != Eigen::Success)
    throw Error(ErrorCode::kInvalidArgument, "kernel matrix is not positive definite");
  alpha_ = llt_.solve(centered);

  double log_det = 0.0;
  const Eigen::MatrixXd& l = llt_.matrixLLT();
  for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(l(i, i));
  log_marginal_likelihood_ = -0.5 * centered.dot(alpha_) - log_det -
                             0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

GaussianProcess GaussianProcess::fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                                     std::span<const double> lengthscales, double jitter) {
  std::optional<GaussianProcess> best;
  for (double l : lengthscales) {
    try {
      GaussianProcess gp(inputs, targets, l, jitter);
      if (!best || gp.log_marginal_likelihood() > best->log_marginal_likelihood())
        best = std::move(gp);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInvalidArgument || inputs.rows() < 2) throw;
    }
  }
  if (!best) throw Error(ErrorCode::kInvalidArgument, "no lengthscale produced a valid GP fit");
  return std::move(*best);
}

GaussianProcess::Prediction GaussianProcess::predict(const Eigen::VectorXd& x) const {
  const Eigen::Index n = inputs_.rows();
  Eigen::VectorXd k_star(n);
  for (Eigen::Index i = 0; i < n; ++i)
    k_star(i) = matern52((inputs_.row(i).transpose() - x).norm(), lengthscale_, variance_);
  Prediction p;
  p.mean = mean_ + k_star.dot(alpha_);
  const Eigen::VectorXd v = llt_.matrixL().solve(k_star);
  const double var = variance_ - v.squaredNorm() - jitter_;
  p.stddev = var > 0.0 ? std::sqrt(var) : 0.0;
  return p;
}

double expected_improvement(double mean, double stddev, double best) {
  const double gain = best - mean;
  if (!(stddev > 0.0)) return std::max(0.0, gain);
  const double z = gain / stddev;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return gain * cdf + stddev * pdf;
}

}  // namespace scout
