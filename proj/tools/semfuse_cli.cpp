// Batch CLI for the camera-lidar semantic fusion pipeline.
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "semfuse/artifacts.hpp"
#include "semfuse/errors.hpp"
#include "semfuse/kernels.hpp"
#include "semfuse/labeled_points_io.hpp"
#include "semfuse/motion_correction.hpp"
#include "semfuse/pipeline.hpp"
#include "semfuse/run_config.hpp"
#include "semfuse/synthetic.hpp"

namespace fs = std::filesystem;
using namespace semfuse;

namespace {

RunConfig load_config(const std::string& path, const std::string& strategy,
                      std::uint64_t* seed, int workers) {
  RunConfig cfg = read_run_config(path);
  if (!strategy.empty()) cfg.strategy = parse_strategy(strategy);
  if (seed) cfg.seed = *seed;
  if (workers > 0) cfg.workers = workers;
  return cfg;
}

int cmd_generate(const std::string& scene_path, std::uint64_t seed,
                 const std::string& out) {
  const SyntheticSceneSpec spec = read_scene_spec(scene_path);
  const GeneratedDataset ds = generate_synthetic(spec, seed, out);
  std::cout << "dataset written to " << ds.root << "\n"
            << "  manifest: " << ds.manifest_path << "\n";
  return 0;
}

int cmd_correct(const std::string& config_path, const std::string& strategy,
                int scan_index, const std::string& camera,
                const std::string& out) {
  RunConfig cfg = load_config(config_path, strategy, nullptr, 0);
  const DatasetIndex index = read_dataset_index(cfg.dataset);
  const CalibrationSet calib = read_calibration(
      !cfg.calibration.empty() ? cfg.calibration : index.calibration);
  const auto stream = read_velocity_csv(
      !cfg.velocity.empty() ? cfg.velocity : index.velocity);
  const auto scans =
      read_scans(!cfg.scans.empty() ? cfg.scans : index.scans_file);
  if (scan_index < 0 || static_cast<std::size_t>(scan_index) >= scans.size())
    throw DataError("scan index out of range");
  const LidarScan& scan = scans[scan_index];
  const ScanInput& si = index.scans.at(scan_index);
  double t_ref = si.t_start;
  for (const auto& f : si.frames)
    if (camera.empty() || f.camera == camera) t_ref = f.t_image;

  const EgoPoseSequence ego = predict_ego_motion(
      t_ref, scan.packet_times(), stream, cfg.noise, cfg.ut, cfg.euler_rate_input);

  std::ofstream os(out);
  if (!os) throw DataError("cannot write " + out);
  os << "packet,index,x,y,z,cxx,cxy,cxz,cyy,cyz,czz\n";
  os.precision(9);
  for (std::size_t p = 0; p < scan.packets.size(); ++p) {
    const auto corrected =
        correct_packet(scan.packets[p], ego[p].pose, calib.t_veh_ld, cfg.ut);
    const auto rec = recover_corrected_points(corrected);
    for (std::size_t j = 0; j < rec.size(); ++j) {
      const auto& g = rec[j];
      os << p << ',' << j << ',' << g.mean.x() << ',' << g.mean.y() << ','
         << g.mean.z() << ',' << g.cov(0, 0) << ',' << g.cov(0, 1) << ','
         << g.cov(0, 2) << ',' << g.cov(1, 1) << ',' << g.cov(1, 2) << ','
         << g.cov(2, 2) << "\n";
    }
  }
  std::cout << "corrected scan " << scan_index << " -> " << out << "\n";
  return 0;
}

int cmd_fuse(const std::string& config_path, const std::string& strategy,
             int scan_index, const std::string& out) {
  RunConfig cfg = load_config(config_path, strategy, nullptr, 0);
  const DatasetIndex index = read_dataset_index(cfg.dataset);
  const CalibrationSet calib = read_calibration(
      !cfg.calibration.empty() ? cfg.calibration : index.calibration);
  const auto stream = read_velocity_csv(
      !cfg.velocity.empty() ? cfg.velocity : index.velocity);
  const auto scans =
      read_scans(!cfg.scans.empty() ? cfg.scans : index.scans_file);
  if (scan_index < 0 || static_cast<std::size_t>(scan_index) >= scans.size())
    throw DataError("scan index out of range");

  const ScanFusionResult fused = fuse_scan(cfg, calib, scans[scan_index],
                                           index.scans.at(scan_index), stream);
  write_labeled_points(out, fused.points_cnn, cfg.classes.num_classes());
  write_labeled_points_csv(out + ".csv", fused.points_cnn,
                           cfg.classes.num_classes());
  std::cout << "fused scan " << scan_index << ": " << fused.points_cnn.size()
            << " labeled points -> " << out << "\n";
  return 0;
}

int cmd_map(const std::string& config_path, const std::string& strategy,
            const std::string& out_dir) {
  RunConfig cfg = load_config(config_path, strategy, nullptr, 0);
  const RunResult result = run_pipeline(cfg);
  fs::create_directories(out_dir);
  result.map.save((fs::path(out_dir) / "map.bin").string());
  write_map_csv(result.map, cfg.classes,
                (fs::path(out_dir) / "map.csv").string());
  std::cout << "map: " << result.map.voxel_count() << " voxels -> " << out_dir
            << "/map.bin\n";
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& strategy,
             const std::string& out_dir) {
  RunConfig cfg = load_config(config_path, strategy, nullptr, 0);
  if (cfg.ground_truth.empty() && cfg.dataset.empty())
    throw ConfigError("eval needs ground truth (via config or dataset)");
  const RunResult result = run_pipeline(cfg);
  if (!result.point_eval)
    throw DataError("no ground truth available for evaluation");
  fs::create_directories(out_dir);
  result.point_eval->write_metrics_csv(
      (fs::path(out_dir) / "metrics_points.csv").string());
  result.point_eval->write_confusion_csv(
      (fs::path(out_dir) / "confusion_points.csv").string());
  if (result.map_eval) {
    result.map_eval->write_metrics_csv(
        (fs::path(out_dir) / "metrics_map.csv").string());
    result.map_eval->write_confusion_csv(
        (fs::path(out_dir) / "confusion_map.csv").string());
  }
  std::cout << "point macro-F1: " << result.point_eval->macro_f1 << "\n";
  if (result.map_eval)
    std::cout << "map macro-F1:   " << result.map_eval->macro_f1 << "\n";
  return 0;
}

int cmd_plot(const std::string& map_path, const std::string& config_path,
             const std::string& out_dir) {
  ClassTable classes = ClassTable::default_table();
  if (!config_path.empty()) classes = read_run_config(config_path).classes;
  const SemanticOctree map = SemanticOctree::load(map_path);
  fs::create_directories(out_dir);
  write_map_topdown(map, classes, (fs::path(out_dir) / "map_topdown.ppm").string());
  for (int e = 0; e < classes.num_eval_classes(); ++e)
    write_class_layer(map, e,
                      (fs::path(out_dir) / ("class_" + classes.eval_name(e) + ".pgm"))
                          .string());
  std::cout << "rasters -> " << out_dir << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& strategy,
            std::uint64_t seed, bool seed_set, int workers,
            const std::string& out_dir) {
  RunConfig cfg =
      load_config(config_path, strategy, seed_set ? &seed : nullptr, workers);
  const RunResult result = run_pipeline(cfg);
  emit_artifacts(result, cfg, out_dir);
  std::cout << "strategy " << strategy_name(cfg.strategy) << ": "
            << result.labeled_points << " labeled points, "
            << result.map.voxel_count() << " voxels\n";
  if (result.point_eval)
    std::cout << "point macro-F1: " << result.point_eval->macro_f1 << "\n";
  if (result.map_eval)
    std::cout << "map macro-F1:   " << result.map_eval->macro_f1 << "\n";
  std::cout << "artifacts -> " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"camera-lidar probabilistic semantic fusion"};
  app.require_subcommand(1);

  std::string scene, config, strategy, camera, out, map_path;
  std::uint64_t seed = 1;
  bool seed_set = false;
  int scan_index = 0;
  int workers = 0;

  auto* gen = app.add_subcommand("generate", "synthesize a dataset with ground truth");
  gen->add_option("--scene", scene, "scene spec JSON")->required();
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--out", out, "output directory")->required();

  auto* correct = app.add_subcommand("correct", "motion-correct one scan to CSV");
  correct->add_option("--config", config, "run config JSON")->required();
  correct->add_option("--scan", scan_index, "scan index")->required();
  correct->add_option("--camera", camera, "camera name (reference time)");
  correct->add_option("--out", out, "output CSV")->required();

  auto* fuse = app.add_subcommand("fuse", "fuse one scan to labeled points");
  fuse->add_option("--config", config, "run config JSON")->required();
  fuse->add_option("--strategy", strategy, "direct|motion_corrected|motion_corrected_masked");
  fuse->add_option("--scan", scan_index, "scan index")->required();
  fuse->add_option("--out", out, "output labeled point file")->required();

  auto* mapcmd = app.add_subcommand("map", "run the pipeline, write the map only");
  mapcmd->add_option("--config", config, "run config JSON")->required();
  mapcmd->add_option("--strategy", strategy, "strategy override");
  mapcmd->add_option("--out", out, "output directory")->required();

  auto* evalcmd = app.add_subcommand("eval", "run and report metrics against ground truth");
  evalcmd->add_option("--config", config, "run config JSON")->required();
  evalcmd->add_option("--strategy", strategy, "strategy override");
  evalcmd->add_option("--out", out, "output directory")->required();

  auto* plot = app.add_subcommand("plot", "rasterize a map snapshot");
  plot->add_option("--map", map_path, "map snapshot")->required();
  plot->add_option("--config", config, "run config JSON (class table)");
  plot->add_option("--out", out, "output directory")->required();

  auto* run = app.add_subcommand("run", "full pipeline with artifacts");
  run->add_option("--config", config, "run config JSON")->required();
  run->add_option("--strategy", strategy, "strategy override");
  run->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
    seed_set = true;
  });
  run->add_option("--workers", workers, "worker threads (does not change results)");
  run->add_option("--out", out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(scene, seed, out);
    if (correct->parsed()) return cmd_correct(config, strategy, scan_index, camera, out);
    if (fuse->parsed()) return cmd_fuse(config, strategy, scan_index, out);
    if (mapcmd->parsed()) return cmd_map(config, strategy, out);
    if (evalcmd->parsed()) return cmd_eval(config, strategy, out);
    if (plot->parsed()) return cmd_plot(map_path, config, out);
    if (run->parsed()) return cmd_run(config, strategy, seed, seed_set, workers, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
