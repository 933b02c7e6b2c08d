#include "semfuse/unscented.hpp"

#include <cmath>
#include <stdexcept>

#include "semfuse/errors.hpp"

namespace semfuse {

namespace {

void validate_params(int d, const UTParams& p) {
  if (!(p.alpha > 0.0) || p.alpha > 1.0)
    throw std::invalid_argument("UTParams: alpha must be in (0, 1]");
  if (p.kappa < 0.0) throw std::invalid_argument("UTParams: kappa must be >= 0");
  const double lambda = p.alpha * p.alpha * (d + p.kappa) - d;
  if (!(d + lambda > 0.0))
    throw std::invalid_argument("UTParams: d + lambda must be positive");
}

}  // namespace

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
  const int d = static_cast<int>(cov.rows());
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());

  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  const double jitter = 1e-12 * sym.trace() / d;
  if (jitter > 0.0) {
    Eigen::MatrixXd jittered = sym;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }

  // Semidefinite (or numerically indefinite within tolerance): pivoted LDLT,
  // R = P^T L sqrt(max(D, 0)) still satisfies R R^T = Sigma.
  Eigen::LDLT<Eigen::MatrixXd> ldlt(sym);
  if (ldlt.info() != Eigen::Success)
    throw NotPsdError("psd_sqrt: LDLT factorization failed");
  Eigen::VectorXd diag = ldlt.vectorD();
  const double scale = std::max(1.0, sym.diagonal().cwiseAbs().maxCoeff());
  for (int i = 0; i < d; ++i) {
    if (diag[i] < -1e-10 * scale)
      throw NotPsdError("psd_sqrt: covariance has negative directions");
    if (diag[i] < 0.0) diag[i] = 0.0;
  }
  Eigen::MatrixXd l = ldlt.matrixL();
  Eigen::MatrixXd r = l * diag.cwiseSqrt().asDiagonal();
  return ldlt.transpositionsP().transpose() * r;
}

SigmaPointSet utd(const GaussianState& g, const UTParams& p) {
  const int d = g.dim();
  if (d < 1) throw std::invalid_argument("utd: empty state");
  if (g.cov.rows() != d || g.cov.cols() != d)
    throw std::invalid_argument("utd: covariance dimension mismatch");
  validate_params(d, p);

  const double lambda = p.alpha * p.alpha * (d + p.kappa) - d;
  const double dl = d + lambda;

  const Eigen::MatrixXd r = std::sqrt(dl) * psd_sqrt(g.cov);

  SigmaPointSet s;
  s.points.resize(2 * d + 1, d);
  s.points.row(0) = g.mean.transpose();
  for (int i = 0; i < d; ++i) {
    s.points.row(1 + i) = (g.mean + r.col(i)).transpose();
    s.points.row(1 + d + i) = (g.mean - r.col(i)).transpose();
  }
  s.wm.resize(2 * d + 1);
  s.wc.resize(2 * d + 1);
  s.wm[0] = lambda / dl;
  s.wc[0] = lambda / dl + (1.0 - p.alpha * p.alpha + p.beta);
  const double wi = 1.0 / (2.0 * dl);
  for (int i = 1; i <= 2 * d; ++i) {
    s.wm[i] = wi;
    s.wc[i] = wi;
  }
  return s;
}

GaussianState utr(const SigmaPointSet& s) {
  const int n = s.count();
  if (n < 1 || s.wm.size() != n || s.wc.size() != n)
    throw std::invalid_argument("utr: inconsistent sigma set");
  const int e = static_cast<int>(s.points.cols());

  GaussianState g;
  g.mean = s.points.transpose() * s.wm;

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(e, e);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd dx = s.points.row(i).transpose() - g.mean;
    cov.noalias() += s.wc[i] * (dx * dx.transpose());
  }
  cov = 0.5 * (cov + cov.transpose()).eval();

  if ((s.wc.array() < 0.0).any()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() == Eigen::Success && es.eigenvalues().minCoeff() < 0.0) {
      const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
      cov = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      cov = 0.5 * (cov + cov.transpose()).eval();
    }
  }
  g.cov = cov;
  return g;
}

GaussianState ut_propagate(
    const GaussianState& g, const UTParams& p,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) {
  SigmaPointSet s = utd(g, p);
  const int n = s.count();
  Eigen::MatrixXd mapped;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd y = f(s.points.row(i).transpose());
    if (i == 0) mapped.resize(n, y.size());
    mapped.row(i) = y.transpose();
  }
  SigmaPointSet out{std::move(mapped), std::move(s.wm), std::move(s.wc)};
  return utr(out);
}

}  // namespace semfuse
