#include "semfuse/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "semfuse/errors.hpp"
#include "semfuse/motion_correction.hpp"
#include "semfuse/parallel.hpp"
#include "semfuse/slic.hpp"

namespace semfuse {

namespace fs = std::filesystem;
using nlohmann::json;

DatasetIndex read_dataset_index(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open dataset manifest: " + manifest_path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DataError("dataset manifest parse error: " + std::string(e.what()));
  }
  DatasetIndex idx;
  idx.root = fs::path(manifest_path).parent_path().string();
  auto resolve = [&idx](const std::string& rel) {
    return rel.empty() ? rel : (fs::path(idx.root) / rel).string();
  };
  try {
    for (const auto& c : j.at("classes")) idx.class_names.push_back(c);
    for (const auto& s : j.at("scans")) {
      ScanInput scan;
      scan.id = s.at("id").get<int>();
      scan.t_start = s.at("t_start").get<double>();
      for (const auto& f : s.at("cameras")) {
        FrameInput frame;
        frame.camera = f.at("name").get<std::string>();
        frame.t_image = f.at("t_image").get<double>();
        frame.score_map_path = resolve(f.at("score_map").get<std::string>());
        frame.image_path = resolve(f.value("image", std::string{}));
        frame.superpixel_path = resolve(f.value("superpixels", std::string{}));
        scan.frames.push_back(std::move(frame));
      }
      idx.scans.push_back(std::move(scan));
    }
    idx.calibration = resolve(j.value("calibration", std::string{}));
    idx.velocity = resolve(j.value("velocity", std::string{}));
    idx.scans_file = resolve(j.value("scans_file", std::string{}));
    idx.ground_truth = resolve(j.value("ground_truth", std::string{}));
  } catch (const json::exception& e) {
    throw DataError("dataset manifest error: " + std::string(e.what()));
  }
  return idx;
}

RigidTransform integrate_odometry(std::span<const VelocitySample> stream,
                                  double t) {
  if (stream.empty()) throw EmptyStreamError("integrate_odometry: empty stream");
  Eigen::Matrix4d pose = Eigen::Matrix4d::Identity();
  double t_cur = stream.front().t;
  if (t < t_cur) {
    // before the stream: hold the first twist backward
    pose = exp_se3(stream.front().w * (t - t_cur), stream.front().v * (t - t_cur));
    return RigidTransform::from_matrix(pose);
  }
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const double t_next = (i + 1 < stream.size()) ? stream[i + 1].t : t;
    const double t_end = std::min(t, t_next);
    if (t_end > t_cur) {
      const double dt = t_end - t_cur;
      pose = pose * exp_se3(stream[i].w * dt, stream[i].v * dt);
      t_cur = t_end;
    }
    if (t_cur >= t) break;
  }
  if (t > t_cur) {  // beyond the stream: hold the last twist
    const double dt = t - t_cur;
    pose = pose * exp_se3(stream.back().w * dt, stream.back().v * dt);
  }
  return RigidTransform::from_matrix(pose);
}

namespace {

const CameraCalibration& camera_by_name(const CalibrationSet& calib,
                                        const std::string& name) {
  for (const auto& c : calib.cameras)
    if (c.name == name) return c;
  throw ConfigError("camera not in calibration file: " + name);
}

ClassProbabilityImage one_hot_probs(const LabelImage& labels, int classes) {
  ClassProbabilityImage p;
  p.classes = classes;
  p.height = labels.height;
  p.width = labels.width;
  p.probs.assign(static_cast<std::size_t>(classes) * labels.labels.size(), 0.0);
  const std::size_t plane = p.plane();
  for (std::size_t i = 0; i < labels.labels.size(); ++i)
    p.probs[labels.labels[i] * plane + i] = 1.0;
  return p;
}

}  // namespace

ScanFusionResult fuse_scan(const RunConfig& cfg, const CalibrationSet& calib,
                           const LidarScan& scan, const ScanInput& input,
                           std::span<const VelocitySample> stream) {
  ScanFusionResult result;
  result.scan_id = input.id;

  // Flat ground-truth indexing: packets in order, points in packet order.
  std::vector<std::size_t> packet_offset(scan.packets.size() + 1, 0);
  for (std::size_t p = 0; p < scan.packets.size(); ++p)
    packet_offset[p + 1] = packet_offset[p] + scan.packets[p].points.size();

  const std::vector<double> packet_times = scan.packet_times();
  const int n_eval = cfg.classes.num_eval_classes();

  VelocityNoise noise = cfg.noise;

  for (const auto& frame : input.frames) {
    const CameraCalibration& cam = camera_by_name(calib, frame.camera);
    result.input_points += scan.point_count();

    ScoreMap sm = read_score_map(frame.score_map_path);
    if (sm.classes != cfg.classes.num_classes())
      throw DataError("score map class count does not match the class table: " +
                      frame.score_map_path);

    ClassProbabilityImage probs;
    std::vector<ProjectedPointGaussian> proj;
    ProjectionDiagnostics pdiag;

    if (cfg.strategy == Strategy::kDirect) {
      probs = one_hot_probs(argmax_labels(sm), sm.classes);
      std::vector<std::vector<ProjectedPointGaussian>> per_packet(
          scan.packets.size());
      std::vector<ProjectionDiagnostics> diags(scan.packets.size());
      parallel_for(scan.packets.size(), cfg.workers, [&](std::size_t p) {
        per_packet[p] = project_direct(scan.packets[p], static_cast<int>(p),
                                       cam.t_cam_ld, cam.intrinsics, &diags[p]);
      });
      for (std::size_t p = 0; p < per_packet.size(); ++p) {
        pdiag.behind_camera += diags[p].behind_camera;
        proj.insert(proj.end(), per_packet[p].begin(), per_packet[p].end());
      }
    } else {
      // Heuristic label probabilities
      SuperpixelMap sp;
      if (!frame.superpixel_path.empty()) {
        sp = read_superpixel_map(frame.superpixel_path);
      } else {
        if (frame.image_path.empty())
          throw DataError("frame has neither image nor superpixel map");
        sp = slic_segment(read_ppm(frame.image_path), cfg.slic.k,
                          cfg.slic.compactness, cfg.slic.iterations);
      }
      const LabelImage labels = argmax_labels(sm);
      const SuperpixelStats stats = predominant_fraction(sp, labels);
      probs = tempered_softmax(sm, sp, stats);

      // Ego-motion at this camera's reference time and per-packet correction
      EgoPoseSequence ego =
          predict_ego_motion(frame.t_image, packet_times, stream, noise, cfg.ut,
                             cfg.euler_rate_input);

      std::vector<std::vector<ProjectedPointGaussian>> per_packet(
          scan.packets.size());
      std::vector<ProjectionDiagnostics> diags(scan.packets.size());
      parallel_for(scan.packets.size(), cfg.workers, [&](std::size_t p) {
        const CorrectedPacketSigma corrected = correct_packet(
            scan.packets[p], ego[p].pose, calib.t_veh_ld, cfg.ut);
        const std::vector<PointGaussian3> rec =
            recover_corrected_points(corrected);
        per_packet[p] =
            project_corrected(corrected, static_cast<int>(p), rec,
                              cam.t_cam_ld, cam.intrinsics, &diags[p]);
      });
      for (std::size_t p = 0; p < per_packet.size(); ++p) {
        pdiag.behind_camera += diags[p].behind_camera;
        proj.insert(proj.end(), per_packet[p].begin(), per_packet[p].end());
      }
    }
    result.behind_camera += pdiag.behind_camera;

    // Occlusion masking
    std::vector<std::uint8_t> visible(proj.size(), 1);
    if (cfg.strategy == Strategy::kMotionCorrectedMasked) {
      const GapSpec gaps =
          compute_gaps(cam.intrinsics, cfg.theta_h_deg * M_PI / 180.0,
                       cfg.theta_v_deg * M_PI / 180.0);
      const std::vector<std::size_t> order = sort_by_range(proj);
      visible = occlusion_filter(proj, order, gaps, cam.intrinsics.width,
                                 cam.intrinsics.height);
      for (std::uint8_t v : visible) result.visible_points += v;
    }

    TransferDiagnostics tdiag;
    std::vector<LabeledPoint> labeled =
        transfer_labels(proj, visible, probs, &tdiag);
    result.empty_window += tdiag.empty_window;

    // Class merge and map-frame transform
    const RigidTransform t_map_veh = integrate_odometry(stream, frame.t_image);
    const RigidTransform t_map_ld = t_map_veh * calib.t_veh_ld;

    ScanFusionResult::MapCloud cloud;
    cloud.origin = t_map_ld.trans();
    cloud.points.reserve(labeled.size());
    for (auto& lp : labeled) {
      Eigen::VectorXd eval_probs(n_eval);
      const double kept = cfg.classes.fold(lp.class_probs.data(), eval_probs.data());
      result.points_cnn.push_back(lp);
      if (kept <= 1e-3) {
        ++result.discarded_class;
        continue;
      }
      eval_probs /= kept;

      LabeledPoint mp = lp;
      mp.class_probs = std::move(eval_probs);
      mp.mean_xyz = t_map_ld.apply(lp.mean_xyz);
      mp.cov_xyz = t_map_ld.rotation() * lp.cov_xyz * t_map_ld.rotation().transpose();

      int best = 0;
      for (int e = 1; e < n_eval; ++e)
        if (mp.class_probs[e] > mp.class_probs[best]) best = e;
      result.pred_eval.push_back(best);
      result.gt_flat.push_back(packet_offset[lp.packet] + lp.index);
      cloud.points.push_back(std::move(mp));
    }
    result.map_clouds.push_back(std::move(cloud));
  }
  return result;
}

RunResult run_pipeline(const RunConfig& cfg) {
  DatasetIndex index;
  if (!cfg.dataset.empty()) {
    index = read_dataset_index(cfg.dataset);
  }
  const std::string calib_path =
      !cfg.calibration.empty() ? cfg.calibration : index.calibration;
  const std::string velocity_path =
      !cfg.velocity.empty() ? cfg.velocity : index.velocity;
  const std::string scans_path =
      !cfg.scans.empty() ? cfg.scans : index.scans_file;
  const std::string gt_path =
      !cfg.ground_truth.empty() ? cfg.ground_truth : index.ground_truth;
  if (calib_path.empty() || velocity_path.empty() || scans_path.empty())
    throw ConfigError("pipeline needs calibration, velocity, and scans inputs");

  const CalibrationSet calib = read_calibration(calib_path);
  const std::vector<VelocitySample> stream = read_velocity_csv(velocity_path);
  const std::vector<LidarScan> scans = read_scans(scans_path);
  if (index.scans.empty())
    throw ConfigError("pipeline requires a dataset manifest listing score maps");
  if (index.scans.size() != scans.size())
    throw DataError("dataset manifest scan count does not match scans file");

  std::optional<GroundTruth> gt;
  if (!gt_path.empty()) gt = read_ground_truth(gt_path);
  if (gt && gt->per_scan.size() != scans.size())
    throw DataError("ground truth scan count does not match scans file");

  RunResult result{.scans = {},
                   .map = SemanticOctree(cfg.octree),
                   .point_eval = std::nullopt,
                   .map_eval = std::nullopt,
                   .labeled_points = 0,
                   .input_points = 0};

  std::vector<int> all_pred;
  std::vector<int> all_truth;

  for (std::size_t s = 0; s < scans.size(); ++s) {
    ScanFusionResult fused =
        fuse_scan(cfg, calib, scans[s], index.scans[s], stream);
    result.input_points += fused.input_points;

    // Map insertion, serialized in scan order.
    for (const auto& cloud : fused.map_clouds) {
      result.map.insert_scan(cloud.origin, cloud.points);
      result.labeled_points += cloud.points.size();
    }

    if (gt) {
      const auto& gt_scan = gt->per_scan[s];
      for (std::size_t i = 0; i < fused.pred_eval.size(); ++i) {
        const std::size_t flat = fused.gt_flat[i];
        if (flat >= gt_scan.size())
          throw DataError("ground truth index out of range (scan " +
                          std::to_string(s) + ")");
        const int t_eval =
            cfg.classes.merge_target(static_cast<int>(gt_scan[flat].class_id));
        all_pred.push_back(fused.pred_eval[i]);
        all_truth.push_back(t_eval);  // kDiscard (-1) pairs are dropped
      }
    }
    result.scans.push_back(std::move(fused));
  }

  std::vector<std::string> eval_names;
  for (int e = 0; e < cfg.classes.num_eval_classes(); ++e)
    eval_names.push_back(cfg.classes.eval_name(e));

  if (gt) {
    result.point_eval = evaluate(all_pred, all_truth, eval_names);

    // Map-level: majority-vote ground-truth voxels vs predicted argmax.
    struct Votes {
      std::vector<std::uint32_t> counts;
    };
    std::unordered_map<VoxelKey, Votes, VoxelKeyHash> gt_map;
    const int n_eval = cfg.classes.num_eval_classes();
    for (const auto& scan_gt : gt->per_scan) {
      for (const auto& p : scan_gt) {
        const int e = cfg.classes.merge_target(static_cast<int>(p.class_id));
        if (e < 0) continue;
        const VoxelKey key = result.map.key_of(
            Eigen::Vector3d(p.x, p.y, p.z));
        auto& votes = gt_map[key];
        if (votes.counts.empty()) votes.counts.assign(n_eval, 0);
        ++votes.counts[e];
      }
    }
    std::vector<int> map_pred, map_truth;
    for (const auto& voxel : result.map.to_point_cloud()) {
      if (voxel.class_probs.empty()) continue;
      const auto it = gt_map.find(voxel.key);
      if (it == gt_map.end()) continue;
      int best_t = 0;
      for (int e = 1; e < n_eval; ++e)
        if (it->second.counts[e] > it->second.counts[best_t]) best_t = e;
      int best_p = 0;
      for (int e = 1; e < n_eval; ++e)
        if (voxel.class_probs[e] > voxel.class_probs[best_p]) best_p = e;
      map_pred.push_back(best_p);
      map_truth.push_back(best_t);
    }
    result.map_eval = evaluate(map_pred, map_truth, eval_names);
  }

  return result;
}

}  // namespace semfuse
