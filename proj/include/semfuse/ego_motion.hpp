#ifndef SEMFUSE_EGO_MOTION_HPP
#define SEMFUSE_EGO_MOTION_HPP

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semfuse/geometry.hpp"
#include "semfuse/unscented.hpp"

namespace semfuse {

/// One odometry reading: linear velocity (m/s) and angular rates (rad/s) in
/// the vehicle body frame at time t.
struct VelocitySample {
  double t = 0.0;
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
};

/// Noise model for the odometry stream and packet timing.
struct VelocityNoise {
  Eigen::Matrix3d sigma_v = Eigen::Matrix3d::Zero();  // (m/s)^2
  Eigen::Matrix3d sigma_w = Eigen::Matrix3d::Zero();  // (rad/s)^2
  double sigma_t = 0.0;                               // s, timestamp jitter
  double init_pose_cov = 1e-12;  // diagonal of the reference-pose covariance
};

/// Pose Gaussian (Pose6 layout [x,y,z,roll,pitch,yaw]) at a packet timestamp.
struct TimedPoseGaussian {
  double t = 0.0;
  GaussianState pose;
};

using EgoPoseSequence = std::vector<TimedPoseGaussian>;

/// Sample with the smallest |t - query|; ties pick the earlier sample.
/// Clamps outside the stream range. Throws EmptyStreamError on empty input.
const VelocitySample& nearest_velocity(std::span<const VelocitySample> stream,
                                       double t);

/// Integrate a constant body twist from t_from to t_to (negative durations
/// allowed): new pose = pose_to_transform(pose) * exp_se3(w dt, v dt).
Pose6 kinematic_step(const Pose6& pose, const Eigen::Vector3d& v,
                     const Eigen::Vector3d& w, double t_from, double t_to);

/// Predict the Gaussian vehicle pose at every packet timestamp relative to the
/// vehicle frame at t_ref. Packets before t_ref are chained backward from the
/// one nearest t_ref, packets at/after t_ref forward; each step augments the
/// running pose with the destination packet's velocity reading and both
/// timestamps (d = 14), pushes the sigma points through the kinematic model,
/// and recovers the 6-DoF pose for the next iteration.
/// Requires strictly ascending packet_times and a nonempty, sorted stream.
/// With euler_rate_input the angular readings are treated as Euler-angle
/// rates and converted to body rates at the current sigma attitude.
EgoPoseSequence predict_ego_motion(double t_ref,
                                   std::span<const double> packet_times,
                                   std::span<const VelocitySample> stream,
                                   const VelocityNoise& noise,
                                   const UTParams& params,
                                   bool euler_rate_input = false);

/// CSV I/O for the velocity stream; columns t,vx,vy,vz,wx,wy,wz.
std::vector<VelocitySample> read_velocity_csv(const std::string& path);
void write_velocity_csv(const std::string& path,
                        std::span<const VelocitySample> stream);

}  // namespace semfuse

#endif
