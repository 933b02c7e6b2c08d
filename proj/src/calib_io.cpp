#include "semfuse/calib_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "semfuse/errors.hpp"

namespace semfuse {

namespace {

std::map<std::string, std::string> parse_kv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open calibration file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    std::string rest;
    std::getline(ss, rest);
    const auto begin = rest.find_first_not_of(" \t");
    kv[key] = begin == std::string::npos ? "" : rest.substr(begin);
  }
  return kv;
}

const std::string& require(const std::map<std::string, std::string>& kv,
                           const std::string& key, const std::string& path) {
  const auto it = kv.find(key);
  if (it == kv.end())
    throw ConfigError("calibration file " + path + " missing key: " + key);
  return it->second;
}

double require_double(const std::map<std::string, std::string>& kv,
                      const std::string& key, const std::string& path) {
  std::istringstream ss(require(kv, key, path));
  double v;
  if (!(ss >> v))
    throw ConfigError("calibration key " + key + " is not a number in " + path);
  return v;
}

RigidTransform require_transform(const std::map<std::string, std::string>& kv,
                                 const std::string& key,
                                 const std::string& path) {
  std::istringstream ss(require(kv, key, path));
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (!(ss >> m(r, c)))
        throw ConfigError("calibration key " + key + " needs 16 values in " + path);
  try {
    return RigidTransform::from_matrix(m);
  } catch (const std::invalid_argument&) {
    throw ConfigError("calibration key " + key + " is not a rigid transform in " +
                      path);
  }
}

}  // namespace

CalibrationSet read_calibration(const std::string& path) {
  const auto kv = parse_kv(path);
  CalibrationSet calib;
  if (require(kv, "version", path) != "1")
    throw ConfigError("unsupported calibration version in " + path);
  calib.t_veh_ld = require_transform(kv, "T_veh_ld", path);
  const int count = static_cast<int>(require_double(kv, "camera_count", path));
  if (count < 1) throw ConfigError("camera_count must be >= 1 in " + path);
  for (int i = 0; i < count; ++i) {
    const std::string p = "camera" + std::to_string(i) + ".";
    CameraCalibration cam;
    cam.name = require(kv, p + "name", path);
    cam.intrinsics.width = static_cast<int>(require_double(kv, p + "width", path));
    cam.intrinsics.height = static_cast<int>(require_double(kv, p + "height", path));
    cam.intrinsics.fx = require_double(kv, p + "fx", path);
    cam.intrinsics.fy = require_double(kv, p + "fy", path);
    cam.intrinsics.cx = require_double(kv, p + "cx", path);
    cam.intrinsics.cy = require_double(kv, p + "cy", path);
    cam.intrinsics.skew = require_double(kv, p + "skew", path);
    cam.intrinsics.k1 = require_double(kv, p + "k1", path);
    cam.intrinsics.k2 = require_double(kv, p + "k2", path);
    cam.intrinsics.k3 = require_double(kv, p + "k3", path);
    cam.intrinsics.k4 = require_double(kv, p + "k4", path);
    cam.time_offset = require_double(kv, p + "time_offset", path);
    cam.t_cam_ld = require_transform(kv, p + "T_cam_ld", path);
    if (!cam.intrinsics.valid())
      throw ConfigError("invalid intrinsics for " + p + " in " + path);
    calib.cameras.push_back(std::move(cam));
  }
  return calib;
}

void write_calibration(const std::string& path, const CalibrationSet& calib) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write calibration file: " + path);
  out.precision(17);
  out << "# camera-lidar calibration\n";
  out << "version 1\n";
  out << "T_veh_ld";
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out << ' ' << calib.t_veh_ld.matrix()(r, c);
  out << "\n";
  out << "camera_count " << calib.cameras.size() << "\n";
  for (std::size_t i = 0; i < calib.cameras.size(); ++i) {
    const auto& cam = calib.cameras[i];
    const std::string p = "camera" + std::to_string(i) + ".";
    out << p << "name " << cam.name << "\n";
    out << p << "width " << cam.intrinsics.width << "\n";
    out << p << "height " << cam.intrinsics.height << "\n";
    out << p << "fx " << cam.intrinsics.fx << "\n";
    out << p << "fy " << cam.intrinsics.fy << "\n";
    out << p << "cx " << cam.intrinsics.cx << "\n";
    out << p << "cy " << cam.intrinsics.cy << "\n";
    out << p << "skew " << cam.intrinsics.skew << "\n";
    out << p << "k1 " << cam.intrinsics.k1 << "\n";
    out << p << "k2 " << cam.intrinsics.k2 << "\n";
    out << p << "k3 " << cam.intrinsics.k3 << "\n";
    out << p << "k4 " << cam.intrinsics.k4 << "\n";
    out << p << "time_offset " << cam.time_offset << "\n";
    out << p << "T_cam_ld";
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) out << ' ' << cam.t_cam_ld.matrix()(r, c);
    out << "\n";
  }
}

}  // namespace semfuse
