#include "semfuse/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "semfuse/ego_motion.hpp"
#include "semfuse/errors.hpp"
#include "semfuse/fisheye.hpp"
#include "semfuse/image.hpp"
#include "semfuse/semantic_probability.hpp"

namespace semfuse {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<double> intersect(const Primitive& prim, const Eigen::Vector3d& o,
                                const Eigen::Vector3d& d, double t_min) {
  switch (prim.kind) {
    case Primitive::Kind::kPlane: {
      const Eigen::Vector3d n = prim.e1.cross(prim.e2);
      const double denom = n.dot(d);
      if (std::abs(denom) < 1e-12) return std::nullopt;
      const double t = n.dot(prim.p0 - o) / denom;
      if (t <= t_min) return std::nullopt;
      const Eigen::Vector3d rel = o + t * d - prim.p0;
      const double e11 = prim.e1.squaredNorm();
      const double e22 = prim.e2.squaredNorm();
      const double e12 = prim.e1.dot(prim.e2);
      const double r1 = rel.dot(prim.e1);
      const double r2 = rel.dot(prim.e2);
      const double det = e11 * e22 - e12 * e12;
      if (std::abs(det) < 1e-12) return std::nullopt;
      const double s = (r1 * e22 - r2 * e12) / det;
      const double u = (r2 * e11 - r1 * e12) / det;
      if (s < 0.0 || s > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
      return t;
    }
    case Primitive::Kind::kBox: {
      // Slab test in the box's yaw-rotated frame.
      const double c = std::cos(prim.yaw), s = std::sin(prim.yaw);
      auto to_local = [&](const Eigen::Vector3d& p) {
        const Eigen::Vector3d rel = p - prim.center;
        return Eigen::Vector3d(c * rel.x() + s * rel.y(),
                               -s * rel.x() + c * rel.y(), rel.z());
      };
      const Eigen::Vector3d lo = to_local(o);
      const Eigen::Vector3d ld(c * d.x() + s * d.y(), -s * d.x() + c * d.y(),
                               d.z());
      double t0 = t_min, t1 = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 3; ++i) {
        if (std::abs(ld[i]) < 1e-12) {
          if (std::abs(lo[i]) > prim.half[i]) return std::nullopt;
          continue;
        }
        double ta = (-prim.half[i] - lo[i]) / ld[i];
        double tb = (prim.half[i] - lo[i]) / ld[i];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return std::nullopt;
      }
      if (t0 <= t_min) return std::nullopt;  // origin inside or behind
      return t0;
    }
    case Primitive::Kind::kCylinder: {
      const double ox = o.x() - prim.base.x();
      const double oy = o.y() - prim.base.y();
      const double a = d.x() * d.x() + d.y() * d.y();
      if (a < 1e-12) return std::nullopt;
      const double b = 2.0 * (ox * d.x() + oy * d.y());
      const double cc = ox * ox + oy * oy - prim.radius * prim.radius;
      const double disc = b * b - 4.0 * a * cc;
      if (disc < 0.0) return std::nullopt;
      const double sq = std::sqrt(disc);
      for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
        if (t <= t_min) continue;
        const double z = o.z() + t * d.z() - prim.base.z();
        if (z >= 0.0 && z <= prim.height) return t;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

Trajectory::Trajectory(std::vector<TwistSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty())
    throw ConfigError("trajectory needs at least one twist segment");
  if (!std::is_sorted(segments_.begin(), segments_.end(),
                      [](const auto& a, const auto& b) {
                        return a.t_start < b.t_start;
                      }))
    throw ConfigError("trajectory segments must be sorted by t_start");
  start_poses_.reserve(segments_.size());
  RigidTransform pose;
  start_poses_.push_back(pose);
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    const auto& seg = segments_[i - 1];
    const double dt = segments_[i].t_start - seg.t_start;
    pose = RigidTransform::from_matrix(
        pose.matrix() * exp_se3(seg.w * dt, seg.v * dt));
    start_poses_.push_back(pose);
  }
}

RigidTransform Trajectory::pose_at(double t) const {
  std::size_t i = segments_.size() - 1;
  while (i > 0 && segments_[i].t_start > t) --i;
  const auto& seg = segments_[i];
  const double dt = t - seg.t_start;
  return RigidTransform::from_matrix(start_poses_[i].matrix() *
                                     exp_se3(seg.w * dt, seg.v * dt));
}

namespace {

Eigen::Vector3d json_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError("expected a 3-element array in scene spec");
  return Eigen::Vector3d(j[0].get<double>(), j[1].get<double>(),
                         j[2].get<double>());
}

RigidTransform json_transform(const json& j) {
  if (!j.is_array() || j.size() != 16)
    throw ConfigError("expected a 16-element row-major transform in scene spec");
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = j[4 * r + c].get<double>();
  try {
    return RigidTransform::from_matrix(m);
  } catch (const std::invalid_argument&) {
    throw ConfigError("scene spec transform is not rigid");
  }
}

}  // namespace

SyntheticSceneSpec read_scene_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scene spec: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("scene spec parse error in " + path + ": " + e.what());
  }

  SyntheticSceneSpec spec;
  spec.num_scans = j.value("num_scans", 1);
  spec.scan_period = j.value("scan_period", 0.1);
  spec.velocity_rate_hz = j.value("velocity_rate_hz", 100);
  spec.label_noise = j.value("label_noise", 0.0);
  spec.score_scale = j.value("score_scale", 6.0);

  if (!j.contains("trajectory") || j["trajectory"].empty())
    throw ConfigError("scene spec needs a trajectory");
  for (const auto& seg : j["trajectory"]) {
    spec.trajectory.push_back(TwistSegment{seg.value("t", 0.0),
                                           json_vec3(seg.at("v")),
                                           json_vec3(seg.at("w"))});
  }

  if (j.contains("lidar")) {
    const auto& l = j["lidar"];
    spec.lidar.rings = l.value("rings", spec.lidar.rings);
    spec.lidar.ring_pitch_deg = l.value("ring_pitch_deg", spec.lidar.ring_pitch_deg);
    spec.lidar.azimuth_step_deg =
        l.value("azimuth_step_deg", spec.lidar.azimuth_step_deg);
    spec.lidar.packets_per_rev =
        l.value("packets_per_rev", spec.lidar.packets_per_rev);
    spec.lidar.max_range = l.value("max_range", spec.lidar.max_range);
    spec.lidar.min_range = l.value("min_range", spec.lidar.min_range);
  }

  spec.calibration.t_veh_ld = json_transform(j.at("T_veh_ld"));
  if (!j.contains("cameras") || j["cameras"].empty())
    throw ConfigError("scene spec needs at least one camera");
  for (const auto& c : j["cameras"]) {
    CameraCalibration cam;
    cam.name = c.value("name", "cam" + std::to_string(spec.calibration.cameras.size()));
    cam.intrinsics.width = c.at("width").get<int>();
    cam.intrinsics.height = c.at("height").get<int>();
    cam.intrinsics.fx = c.at("fx").get<double>();
    cam.intrinsics.fy = c.at("fy").get<double>();
    cam.intrinsics.cx = c.at("cx").get<double>();
    cam.intrinsics.cy = c.at("cy").get<double>();
    cam.intrinsics.skew = c.value("skew", 0.0);
    cam.intrinsics.k1 = c.value("k1", 0.0);
    cam.intrinsics.k2 = c.value("k2", 0.0);
    cam.intrinsics.k3 = c.value("k3", 0.0);
    cam.intrinsics.k4 = c.value("k4", 0.0);
    cam.time_offset = c.value("time_offset", 0.0);
    cam.t_cam_ld = json_transform(c.at("T_cam_ld"));
    spec.calibration.cameras.push_back(std::move(cam));
  }

  if (!j.contains("primitives") || j["primitives"].empty())
    throw ConfigError("scene spec has empty geometry");
  for (const auto& p : j["primitives"]) {
    Primitive prim;
    const std::string kind = p.at("kind").get<std::string>();
    const std::string cls = p.at("class").get<std::string>();
    prim.class_id = spec.classes.index_of(cls);
    if (prim.class_id < 0)
      throw ConfigError("unknown class in scene spec: " + cls);
    if (kind == "plane") {
      prim.kind = Primitive::Kind::kPlane;
      prim.p0 = json_vec3(p.at("p0"));
      prim.e1 = json_vec3(p.at("e1"));
      prim.e2 = json_vec3(p.at("e2"));
      if (prim.e1.cross(prim.e2).norm() < 1e-9)
        throw ConfigError("degenerate plane in scene spec");
    } else if (kind == "box") {
      prim.kind = Primitive::Kind::kBox;
      prim.center = json_vec3(p.at("center"));
      prim.half = json_vec3(p.at("half"));
      prim.yaw = p.value("yaw", 0.0);
      if (prim.half.minCoeff() <= 0.0)
        throw ConfigError("degenerate box in scene spec");
    } else if (kind == "cylinder") {
      prim.kind = Primitive::Kind::kCylinder;
      prim.base = json_vec3(p.at("base"));
      prim.radius = p.at("radius").get<double>();
      prim.height = p.at("height").get<double>();
      if (prim.radius <= 0.0 || prim.height <= 0.0)
        throw ConfigError("degenerate cylinder in scene spec");
    } else {
      throw ConfigError("unknown primitive kind: " + kind);
    }
    spec.primitives.push_back(std::move(prim));
  }

  spec.sky_class = spec.classes.index_of(j.value("sky_class", "sky"));
  if (spec.sky_class < 0) spec.sky_class = 0;
  return spec;
}

void write_ground_truth(const std::string& path, const GroundTruth& gt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write ground truth: " + path);
  out.write("SFGT", 4);
  const std::uint32_t n = static_cast<std::uint32_t>(gt.per_scan.size());
  out.write(reinterpret_cast<const char*>(&n), 4);
  for (const auto& scan : gt.per_scan) {
    const std::uint32_t m = static_cast<std::uint32_t>(scan.size());
    out.write(reinterpret_cast<const char*>(&m), 4);
    for (const auto& p : scan)
      out.write(reinterpret_cast<const char*>(&p), sizeof(GroundTruthPoint));
  }
}

GroundTruth read_ground_truth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open ground truth: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "SFGT", 4) != 0)
    throw DataError("not a ground truth file: " + path);
  std::uint32_t n;
  if (!in.read(reinterpret_cast<char*>(&n), 4))
    throw DataError("truncated ground truth: " + path);
  GroundTruth gt;
  gt.per_scan.resize(n);
  for (auto& scan : gt.per_scan) {
    std::uint32_t m;
    if (!in.read(reinterpret_cast<char*>(&m), 4))
      throw DataError("truncated ground truth: " + path);
    scan.resize(m);
    for (auto& p : scan)
      if (!in.read(reinterpret_cast<char*>(&p), sizeof(GroundTruthPoint)))
        throw DataError("truncated ground truth: " + path);
  }
  return gt;
}

namespace {

struct Hit {
  double t;
  int prim;
};

std::optional<Hit> cast_ray(const std::vector<Primitive>& prims,
                            const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                            double t_min, double t_max) {
  std::optional<Hit> best;
  for (std::size_t i = 0; i < prims.size(); ++i) {
    const auto t = intersect(prims[i], o, d, t_min);
    if (t && *t <= t_max && (!best || *t < best->t))
      best = Hit{*t, static_cast<int>(i)};
  }
  return best;
}

}  // namespace

GeneratedDataset generate_synthetic(const SyntheticSceneSpec& spec,
                                    std::uint64_t seed,
                                    const std::string& out_dir) {
  if (spec.primitives.empty())
    throw ConfigError("generate_synthetic: empty geometry");
  fs::create_directories(out_dir);
  fs::create_directories(fs::path(out_dir) / "scoremaps");
  fs::create_directories(fs::path(out_dir) / "images");

  const Trajectory traj(spec.trajectory);
  const double total_time = spec.num_scans * spec.scan_period;
  if (traj.segments().front().t_start > 0.0)
    throw ConfigError("trajectory must start at t <= 0");

  GeneratedDataset ds;
  ds.root = out_dir;

  // Velocity stream straight from the trajectory twists.
  std::vector<VelocitySample> stream;
  const double dt = 1.0 / spec.velocity_rate_hz;
  for (double t = 0.0; t <= total_time + dt; t += dt) {
    std::size_t i = spec.trajectory.size() - 1;
    while (i > 0 && spec.trajectory[i].t_start > t + 1e-12) --i;
    stream.push_back(VelocitySample{t, spec.trajectory[i].v, spec.trajectory[i].w});
  }
  ds.velocity_path = (fs::path(out_dir) / "velocity.csv").string();
  write_velocity_csv(ds.velocity_path, stream);

  ds.calibration_path = (fs::path(out_dir) / "calibration.txt").string();
  write_calibration(ds.calibration_path, spec.calibration);

  const RigidTransform& t_veh_ld = spec.calibration.t_veh_ld;

  // Lidar rays per revolution.
  const int cols = std::max(
      1, static_cast<int>(std::lround(360.0 / spec.lidar.azimuth_step_deg)));
  const int packets = std::min(spec.lidar.packets_per_rev, cols);
  const double el0 = -0.5 * (spec.lidar.rings - 1) * spec.lidar.ring_pitch_deg;

  std::vector<LidarScan> scans(spec.num_scans);
  GroundTruth gt;
  gt.per_scan.resize(spec.num_scans);

  std::mt19937_64 rng(seed);

  for (int s = 0; s < spec.num_scans; ++s) {
    const double t_scan = s * spec.scan_period;
    auto& scan = scans[s];
    scan.packets.reserve(packets);
    for (int p = 0; p < packets; ++p) {
      const int c0 = static_cast<int>(static_cast<long>(p) * cols / packets);
      const int c1 = static_cast<int>(static_cast<long>(p + 1) * cols / packets);
      LidarPacket packet;
      packet.t = t_scan + spec.scan_period * p / packets;
      const RigidTransform t_w_ld =
          traj.pose_at(packet.t) * t_veh_ld;  // world <- lidar
      const Eigen::Matrix3d r_w_ld = t_w_ld.rotation();
      const Eigen::Vector3d origin = t_w_ld.trans();
      const RigidTransform t_ld_w = t_w_ld.inverse();
      for (int col = c0; col < c1; ++col) {
        const double az = 2.0 * M_PI * col / cols;
        const double caz = std::cos(az), saz = std::sin(az);
        for (int ring = 0; ring < spec.lidar.rings; ++ring) {
          const double el =
              (el0 + ring * spec.lidar.ring_pitch_deg) * M_PI / 180.0;
          const double cel = std::cos(el);
          const Eigen::Vector3d dir_ld(caz * cel, saz * cel, std::sin(el));
          const Eigen::Vector3d dir_w = r_w_ld * dir_ld;
          const auto hit = cast_ray(spec.primitives, origin, dir_w,
                                    spec.lidar.min_range, spec.lidar.max_range);
          if (!hit) continue;
          const Eigen::Vector3d p_w = origin + hit->t * dir_w;
          const Eigen::Vector3d p_ld = t_ld_w.apply(p_w);
          packet.points.push_back(LidarPoint{
              static_cast<float>(p_ld.x()), static_cast<float>(p_ld.y()),
              static_cast<float>(p_ld.z()), static_cast<std::uint8_t>(ring),
              static_cast<float>(az)});
          gt.per_scan[s].push_back(GroundTruthPoint{
              static_cast<float>(p_w.x()), static_cast<float>(p_w.y()),
              static_cast<float>(p_w.z()),
              static_cast<std::uint32_t>(
                  spec.primitives[hit->prim].class_id)});
        }
      }
      // empty packets stay: their timestamps drive the prediction chain
      scan.packets.push_back(std::move(packet));
    }
  }

  ds.scans_path = (fs::path(out_dir) / "scans.bin").string();
  write_scans(ds.scans_path, scans);
  ds.ground_truth_path = (fs::path(out_dir) / "groundtruth.bin").string();
  write_ground_truth(ds.ground_truth_path, gt);

  // Camera score maps + RGB at the image timestamps.
  json manifest;
  manifest["classes"] = json::array();
  for (int c = 0; c < spec.classes.num_classes(); ++c)
    manifest["classes"].push_back(spec.classes.name(c));
  manifest["scans"] = json::array();

  const int n_classes = spec.classes.num_classes();
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uniform_int_distribution<int> any_class(0, n_classes - 1);
  std::uniform_int_distribution<int> tex(-6, 6);

  for (int s = 0; s < spec.num_scans; ++s) {
    const double t_scan = s * spec.scan_period;
    json scan_entry;
    scan_entry["id"] = s;
    scan_entry["t_start"] = t_scan;
    scan_entry["cameras"] = json::array();

    for (const auto& cam : spec.calibration.cameras) {
      const double t_img = t_scan + cam.time_offset;
      const RigidTransform t_w_cam =
          traj.pose_at(t_img) * t_veh_ld * cam.t_cam_ld.inverse();
      const Eigen::Matrix3d r_w_cam = t_w_cam.rotation();
      const Eigen::Vector3d origin = t_w_cam.trans();
      const int w = cam.intrinsics.width, h = cam.intrinsics.height;

      std::vector<std::uint32_t> cls(static_cast<std::size_t>(w) * h);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const Eigen::Vector3d dir_cam =
              unproject_fisheye(cam.intrinsics, x, y);
          const Eigen::Vector3d dir_w = r_w_cam * dir_cam;
          const auto hit = cast_ray(spec.primitives, origin, dir_w, 1e-3,
                                    spec.lidar.max_range * 4.0);
          cls[static_cast<std::size_t>(y) * w + x] =
              hit ? static_cast<std::uint32_t>(
                        spec.primitives[hit->prim].class_id)
                  : static_cast<std::uint32_t>(spec.sky_class);
        }
      }

      // label noise: flip a fraction of pixels to a random other class
      if (spec.label_noise > 0.0) {
        for (auto& c : cls) {
          if (uni(rng) < spec.label_noise) {
            int other = any_class(rng);
            if (static_cast<std::uint32_t>(other) == c)
              other = (other + 1) % n_classes;
            c = static_cast<std::uint32_t>(other);
          }
        }
      }

      // One-hot scores softened by a center-dominant 3x3 blur; the blur keeps
      // the per-pixel argmax equal to the class image.
      ScoreMap sm;
      sm.classes = n_classes;
      sm.height = h;
      sm.width = w;
      sm.scores.assign(static_cast<std::size_t>(n_classes) * w * h, 0.0f);
      const std::size_t plane = sm.plane();
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const std::size_t i = static_cast<std::size_t>(y) * w + x;
          float wsum = 0.0f;
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              const int ny = std::clamp(y + dy, 0, h - 1);
              const int nx = std::clamp(x + dx, 0, w - 1);
              const float wt = (dx == 0 && dy == 0) ? 0.6f : 0.05f;
              sm.scores[cls[static_cast<std::size_t>(ny) * w + nx] * plane + i] +=
                  wt * static_cast<float>(spec.score_scale);
              wsum += wt;
            }
          }
          (void)wsum;
        }
      }

      // RGB render: palette color plus light texture noise for SLIC.
      ImageU8 img;
      img.height = h;
      img.width = w;
      img.rgb.resize(static_cast<std::size_t>(3) * w * h);
      for (std::size_t i = 0; i < cls.size(); ++i) {
        const auto& col = spec.classes.color(static_cast<int>(cls[i]));
        for (int ch = 0; ch < 3; ++ch) {
          const int v = static_cast<int>(col[ch]) + tex(rng);
          img.rgb[3 * i + ch] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
        }
      }

      char base[64];
      std::snprintf(base, sizeof(base), "scan%04d_%s", s, cam.name.c_str());
      const std::string sm_rel = std::string("scoremaps/") + base + ".sfsm";
      const std::string img_rel = std::string("images/") + base + ".ppm";
      write_score_map((fs::path(out_dir) / sm_rel).string(), sm);
      write_ppm((fs::path(out_dir) / img_rel).string(), img);

      json cam_entry;
      cam_entry["name"] = cam.name;
      cam_entry["t_image"] = t_img;
      cam_entry["score_map"] = sm_rel;
      cam_entry["image"] = img_rel;
      scan_entry["cameras"].push_back(std::move(cam_entry));
    }
    manifest["scans"].push_back(std::move(scan_entry));
  }

  manifest["calibration"] = "calibration.txt";
  manifest["velocity"] = "velocity.csv";
  manifest["scans_file"] = "scans.bin";
  manifest["ground_truth"] = "groundtruth.bin";

  ds.manifest_path = (fs::path(out_dir) / "dataset.json").string();
  std::ofstream mf(ds.manifest_path);
  if (!mf) throw DataError("cannot write dataset manifest");
  mf << manifest.dump(2) << "\n";
  return ds;
}

}  // namespace semfuse
