#include "semfuse/fisheye.hpp"

#include <cmath>

namespace semfuse {

std::optional<Eigen::Vector2d> project_fisheye(const FisheyeIntrinsics& k,
                                               const Eigen::Vector3d& p_cam) {
  const double z = p_cam.z();
  if (z <= 0.0) return std::nullopt;

  const double a = p_cam.x() / z;
  const double b = p_cam.y() / z;
  const double r2 = a * a + b * b;
  const double r = std::sqrt(r2);

  double scale;  // theta_d / r, continued through r = 0
  if (r < 1e-8) {
    // atan(r)/r = 1 - r^2/3 + O(r^4); distortion polynomial at theta ~ r.
    const double t2 = r2;
    const double atan_over_r = 1.0 - t2 / 3.0;
    const double poly = 1.0 + k.k1 * t2;  // higher powers below 1e-32 here
    scale = atan_over_r * poly;
  } else {
    const double theta = std::atan(r);
    const double t2 = theta * theta;
    const double theta_d =
        theta * (1.0 + t2 * (k.k1 + t2 * (k.k2 + t2 * (k.k3 + t2 * k.k4))));
    scale = theta_d / r;
  }

  const double xp = scale * a;
  const double yp = scale * b;
  const double u = k.fx * (xp + k.skew * yp) + k.cx;
  const double v = k.fy * yp + k.cy;
  return Eigen::Vector2d(u, v);
}

Eigen::Vector3d unproject_fisheye(const FisheyeIntrinsics& k, double u, double v) {
  const double yp = (v - k.cy) / k.fy;
  const double xp = (u - k.cx) / k.fx - k.skew * yp;
  const double theta_d = std::sqrt(xp * xp + yp * yp);
  if (theta_d < 1e-12) return Eigen::Vector3d(0.0, 0.0, 1.0);

  // Newton on g(theta) = theta (1 + k1 th^2 + ...) - theta_d.
  double theta = theta_d;
  for (int it = 0; it < 20; ++it) {
    const double t2 = theta * theta;
    const double poly =
        1.0 + t2 * (k.k1 + t2 * (k.k2 + t2 * (k.k3 + t2 * k.k4)));
    const double dpoly =
        3.0 * k.k1 * t2 + 5.0 * k.k2 * t2 * t2 + 7.0 * k.k3 * t2 * t2 * t2 +
        9.0 * k.k4 * t2 * t2 * t2 * t2;
    const double g = theta * poly - theta_d;
    const double dg = poly + dpoly;
    const double step = g / dg;
    theta -= step;
    if (std::abs(step) < 1e-14) break;
  }

  const double r = std::tan(theta);
  const double s = r / theta_d;
  const double a = xp * s;
  const double b = yp * s;
  Eigen::Vector3d dir(a, b, 1.0);
  return dir.normalized();
}

}  // namespace semfuse
