#ifndef SEMFUSE_SYNTHETIC_HPP
#define SEMFUSE_SYNTHETIC_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semfuse/calib_io.hpp"
#include "semfuse/class_table.hpp"
#include "semfuse/geometry.hpp"
#include "semfuse/lidar_scan.hpp"

namespace semfuse {

/// Scene geometry primitive with a semantic class.
struct Primitive {
  enum class Kind { kPlane, kBox, kCylinder };
  Kind kind = Kind::kPlane;
  int class_id = 0;
  // plane: p0 + s e1 + t e2, s,t in [0,1]
  Eigen::Vector3d p0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d e1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d e2 = Eigen::Vector3d::Zero();
  // box: yaw-rotated axis-aligned box
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  // cylinder: vertical axis from base, radius x height
  Eigen::Vector3d base = Eigen::Vector3d::Zero();
  double radius = 0.0;
  double height = 0.0;
};

/// Nearest intersection of the ray o + t d (t > t_min) with the primitive.
std::optional<double> intersect(const Primitive& prim, const Eigen::Vector3d& o,
                                const Eigen::Vector3d& d, double t_min);

struct TwistSegment {
  double t_start = 0.0;
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
};

/// Piecewise-constant-twist platform trajectory starting from identity.
class Trajectory {
 public:
  explicit Trajectory(std::vector<TwistSegment> segments);
  RigidTransform pose_at(double t) const;  // world <- vehicle
  const std::vector<TwistSegment>& segments() const { return segments_; }

 private:
  std::vector<TwistSegment> segments_;
  std::vector<RigidTransform> start_poses_;
};

struct LidarModel {
  int rings = 16;
  double ring_pitch_deg = 2.0;     // elevation spacing
  double azimuth_step_deg = 0.2;   // horizontal resolution
  int packets_per_rev = 76;
  double max_range = 80.0;
  double min_range = 0.5;
};

struct SyntheticSceneSpec {
  int num_scans = 1;
  double scan_period = 0.1;   // one revolution
  int velocity_rate_hz = 100;
  double label_noise = 0.0;   // probability of a pixel class flip
  double score_scale = 6.0;   // one-hot activation magnitude
  std::vector<TwistSegment> trajectory;
  LidarModel lidar;
  CalibrationSet calibration;
  std::vector<Primitive> primitives;
  ClassTable classes = ClassTable::default_table();
  int sky_class = 10;        // rendered where no geometry is hit
};

/// JSON scene file; see the repo docs for the schema.
SyntheticSceneSpec read_scene_spec(const std::string& path);

/// Ground truth for one lidar point: generating class and exact world position.
struct GroundTruthPoint {
  float x = 0, y = 0, z = 0;  // world frame
  std::uint32_t class_id = 0;
};

struct GroundTruth {
  std::vector<std::vector<GroundTruthPoint>> per_scan;  // aligned to scan order
};

void write_ground_truth(const std::string& path, const GroundTruth& gt);
GroundTruth read_ground_truth(const std::string& path);

struct GeneratedDataset {
  std::string root;
  std::string calibration_path;
  std::string velocity_path;
  std::string scans_path;
  std::string ground_truth_path;
  std::string manifest_path;  // dataset.json
};

/// Deterministic for (spec, seed). Ray-casts each packet from the platform
/// pose at the packet time (motion distortion is baked into the scans),
/// renders per-camera class score maps and RGB images at the image timestamps,
/// and writes calibration, velocity stream, scans, score maps, images, ground
/// truth and the dataset manifest under out_dir.
GeneratedDataset generate_synthetic(const SyntheticSceneSpec& spec,
                                    std::uint64_t seed,
                                    const std::string& out_dir);

}  // namespace semfuse

#endif
