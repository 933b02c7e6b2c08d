#ifndef SEMFUSE_GEOMETRY_HPP
#define SEMFUSE_GEOMETRY_HPP

#include <Eigen/Dense>

namespace semfuse {

/// 6-DoF pose, angles in radians. Rotation convention is Rz(yaw)*Ry(pitch)*Rx(roll)
/// (body frame), translation in meters.
struct Pose6 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  Eigen::Matrix<double, 6, 1> vector() const {
    Eigen::Matrix<double, 6, 1> v;
    v << x, y, z, roll, pitch, yaw;
    return v;
  }
  static Pose6 from_vector(const Eigen::Matrix<double, 6, 1>& v) {
    return Pose6{v[0], v[1], v[2], v[3], v[4], v[5]};
  }
  /// Angles wrapped to (-pi, pi].
  Pose6 normalized() const;
};

/// Wrap an angle to (-pi, pi].
double normalize_angle(double a);

/// Homogeneous rigid transform. The rotation block stays orthonormal with
/// det +1; the last row is [0,0,0,1].
class RigidTransform {
 public:
  RigidTransform() : m_(Eigen::Matrix4d::Identity()) {}

  /// Validates rigidity (orthonormal rotation, det +1 within 1e-9, proper last
  /// row); throws std::invalid_argument otherwise.
  static RigidTransform from_matrix(const Eigen::Matrix4d& m);
  static RigidTransform from_rotation_translation(const Eigen::Matrix3d& r,
                                                  const Eigen::Vector3d& t);
  static RigidTransform translation(double x, double y, double z);

  const Eigen::Matrix4d& matrix() const { return m_; }
  Eigen::Matrix3d rotation() const { return m_.topLeftCorner<3, 3>(); }
  Eigen::Vector3d trans() const { return m_.topRightCorner<3, 1>(); }

  /// Closed-form rigid inverse: rotation transposed, translation rotated and
  /// negated. Not a general matrix inversion.
  RigidTransform inverse() const;

  RigidTransform operator*(const RigidTransform& rhs) const;

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation() * p + trans();
  }

  bool is_rigid(double tol = 1e-9) const { return is_rigid(m_, tol); }
  static bool is_rigid(const Eigen::Matrix4d& m, double tol = 1e-9);

 private:
  explicit RigidTransform(const Eigen::Matrix4d& m) : m_(m) {}
  Eigen::Matrix4d m_;
};

RigidTransform pose_to_transform(const Pose6& p);

/// Inverse of pose_to_transform; output angles wrapped to (-pi, pi].
Pose6 transform_to_pose(const RigidTransform& t);

/// SE(3) exponential of the body twist (omega, v) given as rotation vector and
/// translation increment. Exact for constant twist and exactly reversible:
/// exp(-xi) = exp(xi)^-1.
Eigen::Matrix4d exp_se3(const Eigen::Vector3d& omega, const Eigen::Vector3d& v);

Eigen::Matrix3d skew(const Eigen::Vector3d& w);

}  // namespace semfuse

#endif
