#ifndef SEMFUSE_FISHEYE_HPP
#define SEMFUSE_FISHEYE_HPP

#include <optional>

#include <Eigen/Dense>

namespace semfuse {

/// Equidistant fisheye camera intrinsics. Focal lengths and principal point in
/// pixels, skew dimensionless, k1..k4 the equidistant distortion polynomial
/// coefficients.
struct FisheyeIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double skew = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  int width = 0;
  int height = 0;

  bool valid() const { return fx > 0.0 && fy > 0.0 && width > 0 && height > 0; }
};

/// Project a camera-frame point to pixel coordinates:
///   a = x/z, b = y/z, r = sqrt(a^2+b^2), theta = atan(r),
///   theta_d = theta (1 + k1 th^2 + k2 th^4 + k3 th^6 + k4 th^8),
///   x' = (theta_d/r) a, y' = (theta_d/r) b,
///   u = fx (x' + skew y') + cx, v = fy y' + cy.
/// The theta_d/r factor is continued analytically through r = 0, so an exactly
/// on-axis point maps to (cx, cy). Returns nullopt for z <= 0 (behind camera).
std::optional<Eigen::Vector2d> project_fisheye(const FisheyeIntrinsics& k,
                                               const Eigen::Vector3d& p_cam);

/// Inverse of project_fisheye for the synthetic renderer: pixel -> unit ray in
/// camera frame (z > 0). Solves theta_d = theta (1 + k1 th^2 + ...) by Newton
/// iteration; exact for zero distortion.
Eigen::Vector3d unproject_fisheye(const FisheyeIntrinsics& k, double u, double v);

}  // namespace semfuse

#endif
