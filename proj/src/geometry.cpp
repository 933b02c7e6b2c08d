#include "semfuse/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace semfuse {

double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * M_PI);
  if (r <= -M_PI) r += 2.0 * M_PI;
  return r;
}

Pose6 Pose6::normalized() const {
  Pose6 p = *this;
  p.roll = normalize_angle(p.roll);
  p.pitch = normalize_angle(p.pitch);
  p.yaw = normalize_angle(p.yaw);
  return p;
}

bool RigidTransform::is_rigid(const Eigen::Matrix4d& m, double tol) {
  const Eigen::Matrix3d r = m.topLeftCorner<3, 3>();
  if ((r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol)
    return false;
  if (std::abs(r.determinant() - 1.0) > tol) return false;
  if (std::abs(m(3, 0)) > tol || std::abs(m(3, 1)) > tol ||
      std::abs(m(3, 2)) > tol || std::abs(m(3, 3) - 1.0) > tol)
    return false;
  return true;
}

RigidTransform RigidTransform::from_matrix(const Eigen::Matrix4d& m) {
  if (!is_rigid(m))
    throw std::invalid_argument("RigidTransform: matrix is not a rigid transform");
  Eigen::Matrix4d fixed = m;
  fixed.row(3) << 0.0, 0.0, 0.0, 1.0;
  return RigidTransform(fixed);
}

RigidTransform RigidTransform::from_rotation_translation(const Eigen::Matrix3d& r,
                                                         const Eigen::Vector3d& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = t;
  return from_matrix(m);
}

RigidTransform RigidTransform::translation(double x, double y, double z) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 3) = x;
  m(1, 3) = y;
  m(2, 3) = z;
  return RigidTransform(m);
}

RigidTransform RigidTransform::inverse() const {
  const Eigen::Matrix3d rt = rotation().transpose();
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rt;
  m.topRightCorner<3, 1>() = -(rt * trans());
  return RigidTransform(m);
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  Eigen::Matrix4d m = m_ * rhs.m_;
  m.row(3) << 0.0, 0.0, 0.0, 1.0;
  return RigidTransform(m);
}

RigidTransform pose_to_transform(const Pose6& p) {
  const double cr = std::cos(p.roll), sr = std::sin(p.roll);
  const double cp = std::cos(p.pitch), sp = std::sin(p.pitch);
  const double cy = std::cos(p.yaw), sy = std::sin(p.yaw);
  Eigen::Matrix3d r;
  // Rz(yaw) * Ry(pitch) * Rx(roll)
  r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
       -sp,     cp * sr,                cp * cr;
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = Eigen::Vector3d(p.x, p.y, p.z);
  return RigidTransform::from_matrix(m);
}

Pose6 transform_to_pose(const RigidTransform& t) {
  const Eigen::Matrix3d r = t.rotation();
  const Eigen::Vector3d tr = t.trans();
  Pose6 p;
  p.x = tr[0];
  p.y = tr[1];
  p.z = tr[2];
  const double sp = -r(2, 0);
  if (std::abs(sp) < 1.0 - 1e-12) {
    p.pitch = std::asin(sp);
    p.roll = std::atan2(r(2, 1), r(2, 2));
    p.yaw = std::atan2(r(1, 0), r(0, 0));
  } else {
    // Gimbal lock: pitch at +-pi/2, roll/yaw coupled; pin yaw to 0.
    p.pitch = std::copysign(M_PI / 2.0, sp);
    p.roll = std::atan2(-r(1, 2), r(1, 1));
    p.yaw = 0.0;
  }
  return p.normalized();
}

Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d s;
  s << 0.0, -w[2], w[1],
       w[2], 0.0, -w[0],
       -w[1], w[0], 0.0;
  return s;
}

Eigen::Matrix4d exp_se3(const Eigen::Vector3d& omega, const Eigen::Vector3d& v) {
  const double theta2 = omega.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Eigen::Matrix3d w = skew(omega);
  const Eigen::Matrix3d w2 = w * w;

  double a, b, c;  // sin t / t, (1 - cos t)/t^2, (t - sin t)/t^3
  if (theta < 1e-6) {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    c = 1.0 / 6.0 - theta2 / 120.0 + theta2 * theta2 / 5040.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
    c = (theta - std::sin(theta)) / (theta2 * theta);
  }

  const Eigen::Matrix3d r = Eigen::Matrix3d::Identity() + a * w + b * w2;
  const Eigen::Matrix3d vmat = Eigen::Matrix3d::Identity() + b * w + c * w2;

  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = vmat * v;
  return m;
}

}  // namespace semfuse
