#include "semfuse/artifacts.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "semfuse/errors.hpp"
#include "semfuse/image.hpp"
#include "semfuse/labeled_points_io.hpp"

namespace semfuse {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ColumnIndex {
  std::int32_t min_x = std::numeric_limits<std::int32_t>::max();
  std::int32_t max_x = std::numeric_limits<std::int32_t>::min();
  std::int32_t min_y = std::numeric_limits<std::int32_t>::max();
  std::int32_t max_y = std::numeric_limits<std::int32_t>::min();
  // (ix, iy) -> voxel export index of the topmost occupied voxel
  std::map<std::pair<std::int32_t, std::int32_t>, std::size_t> top;
  std::vector<VoxelExport> voxels;
};

ColumnIndex build_columns(const SemanticOctree& map) {
  ColumnIndex idx;
  idx.voxels = map.to_point_cloud();
  for (std::size_t i = 0; i < idx.voxels.size(); ++i) {
    const auto& v = idx.voxels[i];
    idx.min_x = std::min(idx.min_x, v.key.ix);
    idx.max_x = std::max(idx.max_x, v.key.ix);
    idx.min_y = std::min(idx.min_y, v.key.iy);
    idx.max_y = std::max(idx.max_y, v.key.iy);
    const auto key = std::make_pair(v.key.ix, v.key.iy);
    const auto it = idx.top.find(key);
    if (it == idx.top.end() || idx.voxels[it->second].key.iz < v.key.iz)
      idx.top[key] = i;
  }
  return idx;
}

}  // namespace

void write_map_topdown(const SemanticOctree& map, const ClassTable& classes,
                       const std::string& path) {
  const ColumnIndex idx = build_columns(map);
  ImageU8 img;
  if (!idx.voxels.empty()) {
    img.width = idx.max_x - idx.min_x + 1;
    img.height = idx.max_y - idx.min_y + 1;
    img.rgb.assign(static_cast<std::size_t>(3) * img.width * img.height, 0);
    for (const auto& [xy, vi] : idx.top) {
      const auto& v = idx.voxels[vi];
      if (v.class_probs.empty()) continue;
      int best = 0;
      for (std::size_t e = 1; e < v.class_probs.size(); ++e)
        if (v.class_probs[e] > v.class_probs[best]) best = static_cast<int>(e);
      const auto color = classes.eval_color(best);
      // +y up in the raster
      const int px = xy.first - idx.min_x;
      const int py = idx.max_y - xy.second;
      auto* p = img.px(py, px);
      p[0] = color[0];
      p[1] = color[1];
      p[2] = color[2];
    }
  }
  write_ppm(path, img);
}

void write_class_layer(const SemanticOctree& map, int eval_class,
                       const std::string& path) {
  const ColumnIndex idx = build_columns(map);
  int width = 0, height = 0;
  std::vector<std::uint8_t> gray;
  if (!idx.voxels.empty()) {
    width = idx.max_x - idx.min_x + 1;
    height = idx.max_y - idx.min_y + 1;
    gray.assign(static_cast<std::size_t>(width) * height, 0);
    std::vector<double> best(gray.size(), 0.0);
    for (const auto& v : idx.voxels) {
      if (static_cast<std::size_t>(eval_class) >= v.class_probs.size()) continue;
      const int px = v.key.ix - idx.min_x;
      const int py = idx.max_y - v.key.iy;
      const std::size_t i = static_cast<std::size_t>(py) * width + px;
      best[i] = std::max(best[i], v.class_probs[eval_class]);
    }
    for (std::size_t i = 0; i < gray.size(); ++i)
      gray[i] = static_cast<std::uint8_t>(std::lround(255.0 * best[i]));
  }
  write_pgm8(path, height, width, gray);
}

void write_map_csv(const SemanticOctree& map, const ClassTable& classes,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write map csv: " + path);
  out << "ix,iy,iz,cx,cy,cz,occupancy";
  for (int e = 0; e < classes.num_eval_classes(); ++e)
    out << ",p_" << classes.eval_name(e);
  out << "\n";
  out.precision(6);
  for (const auto& v : map.to_point_cloud()) {
    out << v.key.ix << ',' << v.key.iy << ',' << v.key.iz << ','
        << v.center.x() << ',' << v.center.y() << ',' << v.center.z() << ','
        << v.occupancy;
    for (int e = 0; e < classes.num_eval_classes(); ++e)
      out << ',' << (static_cast<std::size_t>(e) < v.class_probs.size()
                         ? v.class_probs[e]
                         : 0.0);
    out << "\n";
  }
}

void emit_artifacts(const RunResult& result, const RunConfig& cfg,
                    const std::string& out_dir) {
  fs::create_directories(out_dir);
  fs::create_directories(fs::path(out_dir) / "labeled");

  const int n_cnn = cfg.classes.num_classes();
  for (const auto& scan : result.scans) {
    char name[64];
    std::snprintf(name, sizeof(name), "labeled/scan%04d.bin", scan.scan_id);
    write_labeled_points((fs::path(out_dir) / name).string(), scan.points_cnn,
                         n_cnn);
  }

  result.map.save((fs::path(out_dir) / "map.bin").string());
  write_map_csv(result.map, cfg.classes, (fs::path(out_dir) / "map.csv").string());
  write_map_topdown(result.map, cfg.classes,
                    (fs::path(out_dir) / "map_topdown.ppm").string());
  for (int e = 0; e < cfg.classes.num_eval_classes(); ++e)
    write_class_layer(result.map, e,
                      (fs::path(out_dir) /
                       ("class_" + cfg.classes.eval_name(e) + ".pgm"))
                          .string());

  if (result.point_eval) {
    result.point_eval->write_metrics_csv(
        (fs::path(out_dir) / "metrics_points.csv").string());
    result.point_eval->write_confusion_csv(
        (fs::path(out_dir) / "confusion_points.csv").string());
    result.point_eval->write_histogram_csv(
        (fs::path(out_dir) / "histogram_points.csv").string());
    std::ofstream pretty((fs::path(out_dir) / "confusion_points.txt").string());
    pretty << result.point_eval->format_confusion();
  }
  if (result.map_eval) {
    result.map_eval->write_metrics_csv(
        (fs::path(out_dir) / "metrics_map.csv").string());
    result.map_eval->write_confusion_csv(
        (fs::path(out_dir) / "confusion_map.csv").string());
    result.map_eval->write_histogram_csv(
        (fs::path(out_dir) / "histogram_map.csv").string());
  }

  json manifest;
  manifest["config_hash"] =
      "fnv1a64:" + std::to_string(cfg.config_hash);
  manifest["strategy"] = strategy_name(cfg.strategy);
  manifest["seed"] = cfg.seed;
  manifest["input_points"] = result.input_points;
  manifest["labeled_points"] = result.labeled_points;
  manifest["map_voxels"] = result.map.voxel_count();
  std::size_t behind = 0, empty_window = 0, discarded = 0;
  for (const auto& s : result.scans) {
    behind += s.behind_camera;
    empty_window += s.empty_window;
    discarded += s.discarded_class;
  }
  manifest["behind_camera"] = behind;
  manifest["empty_window"] = empty_window;
  manifest["discarded_class"] = discarded;
  if (result.point_eval) manifest["macro_f1_points"] = result.point_eval->macro_f1;
  if (result.map_eval) manifest["macro_f1_map"] = result.map_eval->macro_f1;
  std::ofstream mf((fs::path(out_dir) / "manifest.json").string());
  if (!mf) throw DataError("cannot write run manifest");
  mf << manifest.dump(2) << "\n";
}

}  // namespace semfuse
