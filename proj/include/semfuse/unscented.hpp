#ifndef SEMFUSE_UNSCENTED_HPP
#define SEMFUSE_UNSCENTED_HPP

#include <functional>

#include <Eigen/Dense>

namespace semfuse {

/// Mean + covariance of a Gaussian over a d-dimensional state.
struct GaussianState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int dim() const { return static_cast<int>(mean.size()); }
};

/// Scaled unscented transform parameters; lambda = alpha^2 (d + kappa) - d.
/// alpha in (0,1], kappa >= 0 keep d + lambda = alpha^2 (d + kappa) > 0.
struct UTParams {
  double alpha = 1.0;
  double kappa = 0.0;
  double beta = 2.0;
};

/// 2d+1 sigma points (rows) with their mean and covariance weights.
struct SigmaPointSet {
  Eigen::MatrixXd points;  // (2d+1) x e
  Eigen::VectorXd wm;
  Eigen::VectorXd wc;

  int count() const { return static_cast<int>(points.rows()); }
};

/// State decomposition: point 0 is the mean, points i and d+i are
/// mean +- column i of sqrt((d+lambda) Sigma), weights
///   wm0 = lambda/(d+lambda), wc0 = wm0 + (1 - alpha^2 + beta),
///   wmi = wci = 1/(2(d+lambda)) for i >= 1.
/// The matrix square root R (Sigma = R R^T) comes from Cholesky; on failure a
/// jitter of 1e-12 trace/d is added and the factorization retried, then a
/// pivoted LDLT accepting eigenvalues >= -1e-10 (relative) covers
/// positive-semidefinite inputs including the zero matrix. Throws NotPsdError
/// when the covariance has genuinely negative directions.
SigmaPointSet utd(const GaussianState& g, const UTParams& p);

/// State recovery: weighted mean and weighted outer-product covariance,
/// symmetrized. When any covariance weight is negative the result is
/// eigenvalue-floored at zero.
GaussianState utr(const SigmaPointSet& s);

/// utr over {f(point_i)} with the source weights.
GaussianState ut_propagate(const GaussianState& g, const UTParams& p,
                           const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f);

/// The square-root factor used by utd, exposed for the sigma-point count
/// sensitive call sites (motion correction reuses it).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov);

}  // namespace semfuse

#endif
