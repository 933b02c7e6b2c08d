#ifndef SEMFUSE_MOTION_CORRECTION_HPP
#define SEMFUSE_MOTION_CORRECTION_HPP

#include <vector>

#include <Eigen/Dense>

#include "semfuse/fisheye.hpp"
#include "semfuse/geometry.hpp"
#include "semfuse/lidar_scan.hpp"
#include "semfuse/unscented.hpp"

namespace semfuse {

/// Motion-corrected sigma positions for one packet: per pose sigma k, SoA
/// coordinate arrays over the packet's M points, plus the pose sigma weights
/// reused at recovery.
struct CorrectedPacketSigma {
  Eigen::VectorXd wm;
  Eigen::VectorXd wc;
  struct Soa {
    std::vector<double> x, y, z;
  };
  std::vector<Soa> sigma;  // 2*6+1 entries for the 6-DoF pose
  std::size_t point_count = 0;
};

struct PointGaussian3 {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
};

/// Projected pixel Gaussian of a corrected point, with the 3D Gaussian and
/// camera range carried alongside.
struct ProjectedPointGaussian {
  int packet = 0;
  int index = 0;  // point index within the packet
  Eigen::Vector2d mean_uv = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov_uv = Eigen::Matrix2d::Zero();
  Eigen::Vector3d mean_xyz = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov_xyz = Eigen::Matrix3d::Zero();
  double range = 0.0;  // distance of the corrected mean to the camera origin
};

struct ProjectionDiagnostics {
  std::size_t behind_camera = 0;  // points excluded (some sigma position z <= 0)
};

/// Decompose the packet pose into 13 sigma poses and push every point through
/// (T_veh_ld)^-1 * T_sigma * T_veh_ld. Weights are kept for recovery.
CorrectedPacketSigma correct_packet(const LidarPacket& pk,
                                    const GaussianState& pose,
                                    const RigidTransform& t_veh_ld,
                                    const UTParams& params);

/// Per-point mean/covariance over the 13 corrected sigma positions.
std::vector<PointGaussian3> recover_corrected_points(
    const CorrectedPacketSigma& c);

/// Transform every sigma position to the camera frame, project, and recover
/// per-point pixel Gaussians with the weights from correction. A point with
/// any sigma position at z <= 0 is excluded and tallied. `recovered` must be
/// the output of recover_corrected_points for the same packet.
std::vector<ProjectedPointGaussian> project_corrected(
    const CorrectedPacketSigma& c, int packet_index,
    const std::vector<PointGaussian3>& recovered,
    const RigidTransform& t_cam_ld, const FisheyeIntrinsics& k,
    ProjectionDiagnostics* diag = nullptr);

/// Direct (uncorrected) projection of raw packet points: zero covariance,
/// mean-only fisheye projection. Behind-camera points are excluded and
/// tallied.
std::vector<ProjectedPointGaussian> project_direct(
    const LidarPacket& pk, int packet_index, const RigidTransform& t_cam_ld,
    const FisheyeIntrinsics& k, ProjectionDiagnostics* diag = nullptr);

}  // namespace semfuse

#endif
