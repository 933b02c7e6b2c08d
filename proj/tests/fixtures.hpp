// Synthetic scenes shared by the pipeline tests and the acceptance suite.

#ifndef SEMFUSE_TESTS_FIXTURES_HPP
#define SEMFUSE_TESTS_FIXTURES_HPP

#include <filesystem>
#include <random>
#include <string>

#include "semfuse/run_config.hpp"
#include "semfuse/synthetic.hpp"

namespace fixtures {

inline semfuse::CameraCalibration front_camera(double cam_below_lidar = 0.5) {
  semfuse::CameraCalibration cam;
  cam.name = "front";
  cam.intrinsics.fx = 350.0;
  cam.intrinsics.fy = 350.0;
  cam.intrinsics.cx = 255.5;
  cam.intrinsics.cy = 191.5;
  cam.intrinsics.width = 512;
  cam.intrinsics.height = 384;
  cam.time_offset = 0.05;
  // camera z-forward along lidar x, mounted cam_below_lidar beneath the lidar
  Eigen::Matrix3d r;
  r << 0, -1, 0,
       0, 0, -1,
       1, 0, 0;
  const Eigen::Vector3d cam_in_lidar(0.0, 0.0, -cam_below_lidar);
  cam.t_cam_ld = semfuse::RigidTransform::from_rotation_translation(
      r, -(r * cam_in_lidar));
  return cam;
}

inline semfuse::Primitive plane(const std::string& cls,
                                const semfuse::ClassTable& table,
                                const Eigen::Vector3d& p0,
                                const Eigen::Vector3d& e1,
                                const Eigen::Vector3d& e2) {
  semfuse::Primitive p;
  p.kind = semfuse::Primitive::Kind::kPlane;
  p.class_id = table.index_of(cls);
  p.p0 = p0;
  p.e1 = e1;
  p.e2 = e2;
  return p;
}

inline semfuse::Primitive box(const std::string& cls,
                              const semfuse::ClassTable& table,
                              const Eigen::Vector3d& center,
                              const Eigen::Vector3d& half, double yaw = 0.0) {
  semfuse::Primitive p;
  p.kind = semfuse::Primitive::Kind::kBox;
  p.class_id = table.index_of(cls);
  p.center = center;
  p.half = half;
  p.yaw = yaw;
  return p;
}

inline semfuse::Primitive cylinder(const std::string& cls,
                                   const semfuse::ClassTable& table,
                                   const Eigen::Vector3d& base, double radius,
                                   double height) {
  semfuse::Primitive p;
  p.kind = semfuse::Primitive::Kind::kCylinder;
  p.class_id = table.index_of(cls);
  p.base = base;
  p.radius = radius;
  p.height = height;
  return p;
}

/// Stationary two-wall scene: fence at 5 m partially blocking the camera's
/// view of a building wall at 10 m; camera half a meter below the lidar.
inline semfuse::SyntheticSceneSpec two_wall_scene(int num_scans = 1) {
  semfuse::SyntheticSceneSpec spec;
  spec.num_scans = num_scans;
  spec.label_noise = 0.0;
  spec.trajectory = {
      {0.0, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()}};
  spec.lidar.rings = 16;
  spec.lidar.ring_pitch_deg = 2.0;
  spec.lidar.azimuth_step_deg = 0.5;
  spec.lidar.packets_per_rev = 36;
  spec.lidar.max_range = 40.0;
  spec.lidar.min_range = 0.5;
  spec.calibration.t_veh_ld =
      semfuse::RigidTransform::translation(0.0, 0.0, 1.8);
  spec.calibration.cameras = {front_camera(0.5)};
  const auto& t = spec.classes;
  // Front wall 5 m out spanning the camera's horizontal field of view, 1.8 m
  // tall (lidar height): the lidar sees the building band above it that the
  // lower camera cannot. Vehicle class, so a wrong transfer onto the wall
  // lands in a different evaluation class than the building behind.
  spec.primitives = {
      plane("vehicle", t, {5.0, -8.0, 0.0}, {0.0, 16.0, 0.0}, {0.0, 0.0, 1.8}),
      // back wall (building) 10 m out
      plane("building", t, {10.0, -6.0, 0.0}, {0.0, 12.0, 0.0}, {0.0, 0.0, 6.0}),
      // ground
      plane("road", t, {0.5, -8.0, 0.0}, {12.0, 0.0, 0.0}, {0.0, 16.0, 0.0}),
  };
  return spec;
}

/// Moving-platform urban scene: road with side strips, buildings lining both
/// sides, thin poles and pedestrian boxes in the foreground, parked vehicles,
/// vegetation, and low fences that occlude the camera but not the lidar.
inline semfuse::SyntheticSceneSpec urban_scene(int num_scans,
                                               double speed = 5.0,
                                               double yaw_rate = 0.02,
                                               double label_noise = 0.02) {
  semfuse::SyntheticSceneSpec spec;
  spec.num_scans = num_scans;
  spec.label_noise = label_noise;
  spec.trajectory = {
      {0.0, Eigen::Vector3d(speed, 0.0, 0.0), Eigen::Vector3d(0.0, 0.0, yaw_rate)}};
  spec.lidar.rings = 16;
  spec.lidar.ring_pitch_deg = 2.0;
  spec.lidar.azimuth_step_deg = 1.0;
  spec.lidar.packets_per_rev = 36;
  spec.lidar.max_range = 40.0;
  spec.lidar.min_range = 0.8;
  spec.calibration.t_veh_ld =
      semfuse::RigidTransform::translation(0.5, 0.0, 1.8);
  spec.calibration.cameras = {front_camera(0.5)};
  const auto& t = spec.classes;
  const double len = 40.0 + num_scans * 0.1 * speed + 40.0;

  spec.primitives = {
      plane("road", t, {-10.0, -3.5, 0.0}, {len, 0.0, 0.0}, {0.0, 7.0, 0.0}),
      plane("undrivable_road", t, {-10.0, 3.5, 0.0}, {len, 0.0, 0.0},
            {0.0, 4.5, 0.0}),
      plane("undrivable_road", t, {-10.0, -8.0, 0.0}, {len, 0.0, 0.0},
            {0.0, 4.5, 0.0}),
      plane("building", t, {-10.0, 8.0, 0.0}, {len, 0.0, 0.0}, {0.0, 0.0, 7.0}),
      plane("building", t, {-10.0, -8.0, 0.0}, {len, 0.0, 0.0}, {0.0, 0.0, 7.0}),
  };
  // thin poles alternating sides every 12 m
  for (int i = 0; i < static_cast<int>(len / 12.0); ++i) {
    const double x = 6.0 + 12.0 * i;
    const double y = (i % 2 == 0) ? 3.8 : -3.8;
    spec.primitives.push_back(cylinder("pole", t, {x, y, 0.0}, 0.1, 5.0));
  }
  // pedestrians near the path
  for (int i = 0; i < static_cast<int>(len / 15.0); ++i) {
    const double x = 9.0 + 15.0 * i;
    const double y = (i % 2 == 0) ? 2.6 : -2.4;
    spec.primitives.push_back(
        box("pedestrian", t, {x, y, 0.85}, {0.22, 0.22, 0.85}));
  }
  // parked vehicles
  for (int i = 0; i < static_cast<int>(len / 25.0); ++i) {
    const double x = 14.0 + 25.0 * i;
    const double y = (i % 2 == 0) ? -5.6 : 5.6;
    spec.primitives.push_back(box("vehicle", t, {x, y, 0.75}, {2.2, 0.9, 0.75}));
  }
  // vegetation clumps
  for (int i = 0; i < static_cast<int>(len / 20.0); ++i) {
    const double x = 11.0 + 20.0 * i;
    const double y = (i % 2 == 0) ? 6.4 : -6.4;
    spec.primitives.push_back(cylinder("vegetation", t, {x, y, 0.0}, 0.8, 4.0));
  }
  // low fences: occlude the camera's view of what lies beyond
  for (int i = 0; i < static_cast<int>(len / 30.0); ++i) {
    const double x = 20.0 + 30.0 * i;
    const double y = (i % 2 == 0) ? 1.8 : -2.1;
    spec.primitives.push_back(
        plane("fence", t, {x, y, 0.0}, {5.0, 0.0, 0.0}, {0.0, 0.0, 1.4}));
  }
  return spec;
}

/// Run config over a generated dataset directory; modest odometry noise.
inline semfuse::RunConfig fixture_config(const semfuse::GeneratedDataset& ds,
                                         semfuse::Strategy strategy) {
  semfuse::RunConfig cfg;
  cfg.dataset = ds.manifest_path;
  cfg.strategy = strategy;
  cfg.noise.sigma_v = 0.01 * Eigen::Matrix3d::Identity();
  cfg.noise.sigma_w = 1e-4 * Eigen::Matrix3d::Identity();
  cfg.noise.sigma_t = 1e-4;
  cfg.noise.init_pose_cov = 1e-12;
  cfg.octree.resolution = 0.2;
  cfg.octree.num_classes = cfg.classes.num_eval_classes();
  cfg.slic.k = 1024;
  cfg.slic.compactness = 10.0;
  cfg.slic.iterations = 6;
  cfg.theta_h_deg = 1.0;  // matches the fixture lidar azimuth step
  cfg.theta_v_deg = 2.0;
  cfg.workers = 2;
  return cfg;
}

struct TempTree {
  std::filesystem::path path;
  explicit TempTree(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           (tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempTree() { std::filesystem::remove_all(path); }
  std::string dir(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace fixtures

#endif
