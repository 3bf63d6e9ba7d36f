#pragma once

// Exact GP regression with a Matern 5/2 kernel, used by the Bayesian
// optimization baseline.

#include <array>
#include <span>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace scout {

// variance * (1 + sqrt5 r/l + 5 r^2 / (3 l^2)) * exp(-sqrt5 r/l)
double matern52(double r, double lengthscale, double variance);

inline constexpr std::array<double, 5> kLengthscaleGrid{0.1, 0.3, 1.0, 3.0, 10.0};
inline constexpr double kDefaultJitter = 1e-6;

class GaussianProcess {
 public:
  struct Prediction {
    double mean = 0.0;
    double stddev = 0.0;
  };

  // inputs: one row per observation. The prior mean is the sample mean of the
  // targets and the signal variance their sample variance (n - 1). Throws
  // InvalidArgument for fewer than two points or a non-PD kernel matrix.
  GaussianProcess(Eigen::MatrixXd inputs, Eigen::VectorXd targets, double lengthscale,
                  double jitter = kDefaultJitter);

  // Picks the lengthscale with the highest log marginal likelihood; ties keep
  // the earlier grid entry.
  static GaussianProcess fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                             std::span<const double> lengthscales = kLengthscaleGrid,
                             double jitter = kDefaultJitter);

  // The jitter is treated as numerical regularization rather than observation
  // noise: it is removed from the predictive variance, which is then clamped
  // at zero. At training inputs this gives stddev == 0.
  Prediction predict(const Eigen::VectorXd& x) const;

  double lengthscale() const { return lengthscale_; }
  double variance() const { return variance_; }
  double log_marginal_likelihood() const { return log_marginal_likelihood_; }

 private:
  Eigen::MatrixXd inputs_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double lengthscale_ = 1.0;
  double jitter_ = kDefaultJitter;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double log_marginal_likelihood_ = 0.0;
};

// EI for minimization against incumbent `best`. Zero stddev gives max(0, best - mean).
double expected_improvement(double mean, double stddev, double best);

}  // namespace scout
