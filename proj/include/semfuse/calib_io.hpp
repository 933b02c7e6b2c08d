#ifndef SEMFUSE_CALIB_IO_HPP
#define SEMFUSE_CALIB_IO_HPP

#include <string>
#include <vector>

#include "semfuse/fisheye.hpp"
#include "semfuse/geometry.hpp"

namespace semfuse {

struct CameraCalibration {
  std::string name;
  FisheyeIntrinsics intrinsics;
  RigidTransform t_cam_ld;  // lidar frame -> camera frame
  double time_offset = 0.0;  // image timestamp offset from scan start, s
};

/// Calibration document: lidar-to-vehicle mount plus per-camera intrinsics
/// and lidar-to-camera extrinsics.
struct CalibrationSet {
  RigidTransform t_veh_ld;  // lidar frame -> vehicle frame
  std::vector<CameraCalibration> cameras;
};

/// Key/value text format (UTF-8, '#' comments). Required keys:
///   version, T_veh_ld (16 row-major doubles), camera_count, and per camera i:
///   camera<i>.name .width .height .fx .fy .cx .cy .skew .k1 .k2 .k3 .k4
///   .time_offset .T_cam_ld (16 row-major doubles).
/// Missing keys and non-rigid transforms are rejected (ConfigError).
CalibrationSet read_calibration(const std::string& path);
void write_calibration(const std::string& path, const CalibrationSet& calib);

}  // namespace semfuse

#endif
