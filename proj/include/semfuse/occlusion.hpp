#ifndef SEMFUSE_OCCLUSION_HPP
#define SEMFUSE_OCCLUSION_HPP

#include <span>
#include <vector>

#include "semfuse/fisheye.hpp"
#include "semfuse/motion_correction.hpp"
#include "semfuse/semantic_probability.hpp"

namespace semfuse {

/// Mask rectangle basis in pixels, from the lidar angular resolutions:
/// u_gap = round(fx tan(theta_h)), v_gap = round(fy tan(theta_v)), floored
/// at 1.
struct GapSpec {
  int u_gap = 1;
  int v_gap = 1;
};

GapSpec compute_gaps(const FisheyeIntrinsics& k, double theta_h, double theta_v);

/// Stable ascending order by camera range; ties keep input order.
std::vector<std::size_t> sort_by_range(
    std::span<const ProjectedPointGaussian> points);

/// Nearest-first masking. A point whose rounded mean pixel is already masked
/// is occluded; a visible point stamps a (2 ceil(u_gap/2)+1) x
/// (2 ceil(v_gap/2)+1) rectangle clipped to the image. Points projecting
/// outside the image are not visible and stamp nothing.
/// Returns per-input-point visibility flags.
std::vector<std::uint8_t> occlusion_filter(
    std::span<const ProjectedPointGaussian> points,
    std::span<const std::size_t> order, const GapSpec& gaps, int width,
    int height);

/// Bivariate normal density at (u, v), mean (mu_u, mu_v), covariance
/// [[su^2, rho su sv], [rho su sv, sv^2]].
double bivariate_pdf(double u, double v, double mu_u, double mu_v,
                     double sigma_u, double sigma_v, double rho);

/// Motion-corrected point carrying the transferred class distribution.
struct LabeledPoint {
  Eigen::Vector3d mean_xyz = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov_xyz = Eigen::Matrix3d::Zero();
  Eigen::VectorXd class_probs;
  Eigen::Vector2d mean_uv = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov_uv = Eigen::Matrix2d::Zero();
  int packet = 0;
  int index = 0;
};

struct TransferDiagnostics {
  std::size_t empty_window = 0;  // dropped: confidence window off-image
};

/// For each visible point, weight the class image by the bivariate density
/// over the integer pixels inside the axis-aligned bounding box of the 90%
/// confidence ellipse (half extents ceil(sqrt(4.605) sigma)), normalize to a
/// simplex. Degenerate covariances (sigma_u and sigma_v below half a pixel)
/// collapse to a nearest-pixel lookup. Points whose window misses the image
/// are dropped and tallied.
std::vector<LabeledPoint> transfer_labels(
    std::span<const ProjectedPointGaussian> points,
    std::span<const std::uint8_t> visible, const ClassProbabilityImage& probs,
    TransferDiagnostics* diag = nullptr);

}  // namespace semfuse

#endif
