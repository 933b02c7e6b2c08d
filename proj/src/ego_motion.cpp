#include "semfuse/ego_motion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "semfuse/errors.hpp"

namespace semfuse {

const VelocitySample& nearest_velocity(std::span<const VelocitySample> stream,
                                       double t) {
  if (stream.empty()) throw EmptyStreamError("nearest_velocity: empty stream");
  const auto it = std::lower_bound(
      stream.begin(), stream.end(), t,
      [](const VelocitySample& s, double q) { return s.t < q; });
  if (it == stream.begin()) return *it;
  if (it == stream.end()) return stream.back();
  const auto prev = std::prev(it);
  // ties pick the earlier sample
  return (t - prev->t <= it->t - t) ? *prev : *it;
}

Pose6 kinematic_step(const Pose6& pose, const Eigen::Vector3d& v,
                     const Eigen::Vector3d& w, double t_from, double t_to) {
  const double dt = t_to - t_from;
  const Eigen::Matrix4d delta = exp_se3(w * dt, v * dt);
  const Eigen::Matrix4d m = pose_to_transform(pose).matrix() * delta;
  Eigen::Matrix4d fixed = m;
  fixed.row(3) << 0.0, 0.0, 0.0, 1.0;
  return transform_to_pose(RigidTransform::from_matrix(fixed));
}

namespace {

constexpr int kPoseDim = 6;
constexpr int kAugDim = 14;  // pose(6) + v(3) + w(3) + t_src + t_dst

// Euler-angle rates -> body rates at the given attitude.
Eigen::Vector3d euler_rates_to_body(const Eigen::Vector3d& w, const Pose6& p) {
  const double cr = std::cos(p.roll), sr = std::sin(p.roll);
  const double cp = std::cos(p.pitch), sp = std::sin(p.pitch);
  Eigen::Matrix3d m;
  m << 1.0, 0.0, -sp,
       0.0, cr, sr * cp,
       0.0, -sr, cr * cp;
  return m * w;
}

GaussianState step_pose_gaussian(const GaussianState& pose, double t_src,
                                 double t_dst, const VelocitySample& vel,
                                 const VelocityNoise& noise,
                                 const UTParams& params, bool euler_rate_input) {
  GaussianState aug;
  aug.mean.resize(kAugDim);
  aug.mean.segment<kPoseDim>(0) = pose.mean;
  aug.mean.segment<3>(6) = vel.v;
  aug.mean.segment<3>(9) = vel.w;
  aug.mean[12] = t_src;
  aug.mean[13] = t_dst;

  aug.cov = Eigen::MatrixXd::Zero(kAugDim, kAugDim);
  aug.cov.topLeftCorner<kPoseDim, kPoseDim>() = pose.cov;
  aug.cov.block<3, 3>(6, 6) = noise.sigma_v;
  aug.cov.block<3, 3>(9, 9) = noise.sigma_w;
  aug.cov(12, 12) = noise.sigma_t * noise.sigma_t;
  aug.cov(13, 13) = noise.sigma_t * noise.sigma_t;

  SigmaPointSet sp = utd(aug, params);
  Eigen::MatrixXd mapped(sp.count(), kPoseDim);
  for (int i = 0; i < sp.count(); ++i) {
    const auto row = sp.points.row(i);
    const Pose6 p = Pose6::from_vector(row.segment<kPoseDim>(0).transpose());
    const Eigen::Vector3d v = row.segment<3>(6).transpose();
    Eigen::Vector3d w = row.segment<3>(9).transpose();
    if (euler_rate_input) w = euler_rates_to_body(w, p);
    mapped.row(i) = kinematic_step(p, v, w, row[12], row[13]).vector().transpose();
  }
  return utr(SigmaPointSet{std::move(mapped), std::move(sp.wm), std::move(sp.wc)});
}

}  // namespace

EgoPoseSequence predict_ego_motion(double t_ref,
                                   std::span<const double> packet_times,
                                   std::span<const VelocitySample> stream,
                                   const VelocityNoise& noise,
                                   const UTParams& params,
                                   bool euler_rate_input) {
  if (stream.empty()) throw EmptyStreamError("predict_ego_motion: empty stream");
  const int n = static_cast<int>(packet_times.size());
  for (int i = 1; i < n; ++i) {
    if (!(packet_times[i] > packet_times[i - 1]))
      throw std::invalid_argument(
          "predict_ego_motion: packet times must be strictly ascending");
  }

  EgoPoseSequence out(n);

  GaussianState init;
  init.mean = Eigen::VectorXd::Zero(kPoseDim);
  init.cov = noise.init_pose_cov *
             Eigen::MatrixXd::Identity(kPoseDim, kPoseDim);

  // Backward branch: packets strictly before t_ref, nearest first.
  int first_fwd = 0;
  while (first_fwd < n && packet_times[first_fwd] < t_ref) ++first_fwd;

  double t_star = t_ref;
  GaussianState state = init;
  for (int i = first_fwd - 1; i >= 0; --i) {
    const double t_pk = packet_times[i];
    const VelocitySample& vel = nearest_velocity(stream, t_pk);
    state = step_pose_gaussian(state, t_star, t_pk, vel, noise, params, euler_rate_input);
    out[i] = TimedPoseGaussian{t_pk, state};
    t_star = t_pk;
  }

  // Forward branch: packets at or after t_ref, ascending.
  t_star = t_ref;
  state = init;
  for (int i = first_fwd; i < n; ++i) {
    const double t_pk = packet_times[i];
    const VelocitySample& vel = nearest_velocity(stream, t_pk);
    state = step_pose_gaussian(state, t_star, t_pk, vel, noise, params, euler_rate_input);
    out[i] = TimedPoseGaussian{t_pk, state};
    t_star = t_pk;
  }

  return out;
}

std::vector<VelocitySample> read_velocity_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open velocity stream: " + path);
  std::vector<VelocitySample> stream;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.rfind("t,", 0) == 0) {  // header
      first = false;
      continue;
    }
    first = false;
    std::istringstream ss(line);
    VelocitySample s;
    char comma;
    if (!(ss >> s.t >> comma >> s.v[0] >> comma >> s.v[1] >> comma >> s.v[2] >>
          comma >> s.w[0] >> comma >> s.w[1] >> comma >> s.w[2]))
      throw DataError("malformed velocity row in " + path + ": " + line);
    stream.push_back(s);
  }
  if (!std::is_sorted(stream.begin(), stream.end(),
                      [](const auto& a, const auto& b) { return a.t < b.t; }))
    throw DataError("velocity stream not sorted by time: " + path);
  return stream;
}

void write_velocity_csv(const std::string& path,
                        std::span<const VelocitySample> stream) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write velocity stream: " + path);
  out << "t,vx,vy,vz,wx,wy,wz\n";
  out.precision(17);
  for (const auto& s : stream) {
    out << s.t << ',' << s.v[0] << ',' << s.v[1] << ',' << s.v[2] << ','
        << s.w[0] << ',' << s.w[1] << ',' << s.w[2] << '\n';
  }
}

}  // namespace semfuse
