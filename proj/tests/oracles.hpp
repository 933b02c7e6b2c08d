// Test-only oracles, independent of the library's computation paths.

#ifndef SEMFUSE_TESTS_ORACLES_HPP
#define SEMFUSE_TESTS_ORACLES_HPP

#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

/// Random PSD covariance with the given dimension and scale.
inline Eigen::MatrixXd random_psd(int d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) a(r, c) = n(rng);
  return scale * (a * a.transpose()) / d;
}

inline Eigen::VectorXd random_vec(int d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

/// Exact propagation of (mean, cov) through y = A x + b.
struct AffineResult {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};
inline AffineResult affine_propagate(const Eigen::VectorXd& mean,
                                     const Eigen::MatrixXd& cov,
                                     const Eigen::MatrixXd& a,
                                     const Eigen::VectorXd& b) {
  return AffineResult{a * mean + b, a * cov * a.transpose()};
}

/// Draw from N(mean, cov) via Cholesky-with-fallback (test-local math).
class GaussianSampler {
 public:
  GaussianSampler(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov)
      : mean_(mean) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    root_ = es.eigenvectors() *
            es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  Eigen::VectorXd operator()(std::mt19937_64& rng) const {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::VectorXd z(mean_.size());
    for (int i = 0; i < z.size(); ++i) z[i] = n(rng);
    return mean_ + root_ * z;
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd root_;
};

/// Exact visibility along the segment camera->point against scene primitives
/// (any strictly nearer intersection occludes the point).
template <typename PrimList, typename IntersectFn>
bool segment_visible(const Eigen::Vector3d& cam, const Eigen::Vector3d& point,
                     const PrimList& prims, IntersectFn&& intersect,
                     double slack = 1e-4) {
  const Eigen::Vector3d d = point - cam;
  const double dist = d.norm();
  for (const auto& prim : prims) {
    const std::optional<double> t = intersect(prim, cam, d / dist, 1e-6);
    if (t && *t < dist * (1.0 - slack)) return false;
  }
  return true;
}

}  // namespace oracles

#endif
