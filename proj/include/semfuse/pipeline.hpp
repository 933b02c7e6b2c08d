#ifndef SEMFUSE_PIPELINE_HPP
#define SEMFUSE_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "semfuse/calib_io.hpp"
#include "semfuse/evaluate.hpp"
#include "semfuse/run_config.hpp"
#include "semfuse/semantic_octree.hpp"
#include "semfuse/synthetic.hpp"

namespace semfuse {

/// Per-camera inputs of one scan, as listed in the dataset manifest.
struct FrameInput {
  std::string camera;
  double t_image = 0.0;
  std::string score_map_path;
  std::string image_path;
  std::string superpixel_path;  // optional precomputed SLIC
};

struct ScanInput {
  int id = 0;
  double t_start = 0.0;
  std::vector<FrameInput> frames;
};

struct DatasetIndex {
  std::string root;
  std::vector<std::string> class_names;
  std::vector<ScanInput> scans;
  std::string calibration;
  std::string velocity;
  std::string scans_file;
  std::string ground_truth;
};

DatasetIndex read_dataset_index(const std::string& manifest_path);

/// Labeled points of one scan plus provenance for matching ground truth.
struct ScanFusionResult {
  int scan_id = 0;
  /// CNN-class distributions in the lidar frame, concatenated across cameras
  /// (the per-scan labeled-point artifact).
  std::vector<LabeledPoint> points_cnn;
  /// Map-frame clouds with merged evaluation classes, one per camera (each
  /// camera has its own reference time, hence its own odometry pose).
  struct MapCloud {
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    std::vector<LabeledPoint> points;
  };
  std::vector<MapCloud> map_clouds;
  std::vector<int> pred_eval;          // per map point, flattened in cloud order
  std::vector<std::size_t> gt_flat;    // per map point: flat GT index in the scan
  std::size_t input_points = 0;
  std::size_t behind_camera = 0;
  std::size_t empty_window = 0;
  std::size_t discarded_class = 0;
  std::size_t visible_points = 0;      // after masking (masked strategy only)
};

struct RunResult {
  std::vector<ScanFusionResult> scans;
  SemanticOctree map;
  std::optional<EvalReport> point_eval;
  std::optional<EvalReport> map_eval;
  std::size_t labeled_points = 0;
  std::size_t input_points = 0;
};

/// Execute the configured strategy over the whole dataset and register every
/// scan into the semantic map. Ground truth, when configured, yields point-
/// and map-level reports.
RunResult run_pipeline(const RunConfig& cfg);

/// Fuse a single scan (all stages up to and excluding map insertion).
ScanFusionResult fuse_scan(const RunConfig& cfg, const CalibrationSet& calib,
                           const LidarScan& scan, const ScanInput& input,
                           std::span<const VelocitySample> stream);

/// Odometry pose at time t by integrating the velocity stream from its start.
RigidTransform integrate_odometry(std::span<const VelocitySample> stream,
                                  double t);

}  // namespace semfuse

#endif
