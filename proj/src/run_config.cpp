#include "semfuse/run_config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "semfuse/errors.hpp"

namespace semfuse {

namespace fs = std::filesystem;
using nlohmann::json;

Strategy parse_strategy(const std::string& s) {
  if (s == "direct") return Strategy::kDirect;
  if (s == "motion_corrected") return Strategy::kMotionCorrected;
  if (s == "motion_corrected_masked") return Strategy::kMotionCorrectedMasked;
  throw ConfigError("unknown strategy: " + s);
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kDirect: return "direct";
    case Strategy::kMotionCorrected: return "motion_corrected";
    case Strategy::kMotionCorrectedMasked: return "motion_corrected_masked";
  }
  return "?";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

Eigen::Matrix3d json_cov3(const json& j, const std::string& what) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  if (j.is_number()) {
    m = j.get<double>() * Eigen::Matrix3d::Identity();
  } else if (j.is_array() && j.size() == 3) {
    for (int i = 0; i < 3; ++i) m(i, i) = j[i].get<double>();
  } else if (j.is_array() && j.size() == 9) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = j[3 * r + c].get<double>();
  } else {
    throw ConfigError(what + " must be a scalar, 3 diagonal values, or 9 values");
  }
  return m;
}

ClassTable parse_class_table(const json& j) {
  std::vector<std::string> names;
  std::vector<std::array<std::uint8_t, 3>> palette;
  std::vector<std::string> eval_names;
  std::vector<int> merge_to;
  for (const auto& n : j.at("names")) names.push_back(n.get<std::string>());
  for (const auto& p : j.at("palette")) {
    if (!p.is_array() || p.size() != 3)
      throw ConfigError("palette entries must be [r,g,b]");
    palette.push_back({static_cast<std::uint8_t>(p[0].get<int>()),
                       static_cast<std::uint8_t>(p[1].get<int>()),
                       static_cast<std::uint8_t>(p[2].get<int>())});
  }
  const auto& merge = j.at("merge");
  // eval classes in first-appearance order of the merge targets
  for (const auto& name : names) {
    const auto it = merge.find(name);
    if (it == merge.end())
      throw ConfigError("merge map missing class: " + name);
    const std::string target = it->get<std::string>();
    if (target == "discard") {
      merge_to.push_back(ClassTable::kDiscard);
      continue;
    }
    int idx = -1;
    for (std::size_t e = 0; e < eval_names.size(); ++e)
      if (eval_names[e] == target) idx = static_cast<int>(e);
    if (idx < 0) {
      idx = static_cast<int>(eval_names.size());
      eval_names.push_back(target);
    }
    merge_to.push_back(idx);
  }
  return ClassTable(std::move(names), std::move(palette), std::move(merge_to),
                    std::move(eval_names));
}

}  // namespace

RunConfig read_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open run config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();

  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ConfigError("run config parse error in " + path + ": " + e.what());
  }

  RunConfig cfg;
  cfg.config_hash = fnv1a64(bytes);
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&base](const std::string& p) {
    if (p.empty()) return p;
    const fs::path fp(p);
    return fp.is_absolute() ? p : (base / fp).string();
  };

  try {
    cfg.dataset = resolve(j.value("dataset", ""));
    cfg.calibration = resolve(j.value("calibration", ""));
    cfg.velocity = resolve(j.value("velocity", ""));
    cfg.scans = resolve(j.value("scans", ""));
    cfg.ground_truth = resolve(j.value("ground_truth", ""));
    cfg.strategy = parse_strategy(
        j.value("strategy", std::string("motion_corrected_masked")));
    if (j.contains("ut")) {
      cfg.ut.alpha = j["ut"].value("alpha", cfg.ut.alpha);
      cfg.ut.kappa = j["ut"].value("kappa", cfg.ut.kappa);
      cfg.ut.beta = j["ut"].value("beta", cfg.ut.beta);
    }
    if (j.contains("noise")) {
      const auto& n = j["noise"];
      if (n.contains("sigma_v")) cfg.noise.sigma_v = json_cov3(n["sigma_v"], "sigma_v");
      if (n.contains("sigma_w")) cfg.noise.sigma_w = json_cov3(n["sigma_w"], "sigma_w");
      cfg.noise.sigma_t = n.value("sigma_t", 1e-4);
      cfg.noise.init_pose_cov = n.value("init_pose_cov", 1e-12);
    } else {
      cfg.noise.sigma_t = 1e-4;
    }
    if (j.contains("octree")) {
      const auto& o = j["octree"];
      cfg.octree.resolution = o.value("resolution", cfg.octree.resolution);
      cfg.octree.p_hit = o.value("p_hit", cfg.octree.p_hit);
      cfg.octree.p_miss = o.value("p_miss", cfg.octree.p_miss);
      cfg.octree.l_min = o.value("l_min", cfg.octree.l_min);
      cfg.octree.l_max = o.value("l_max", cfg.octree.l_max);
      cfg.octree.occupancy_threshold =
          o.value("occupancy_threshold", cfg.octree.occupancy_threshold);
      cfg.octree.epsilon = o.value("epsilon", cfg.octree.epsilon);
    }
    if (j.contains("slic")) {
      const auto& s = j["slic"];
      cfg.slic.k = s.value("k", cfg.slic.k);
      cfg.slic.compactness = s.value("compactness", cfg.slic.compactness);
      cfg.slic.iterations = s.value("iterations", cfg.slic.iterations);
    }
    if (j.contains("lidar")) {
      cfg.theta_h_deg = j["lidar"].value("theta_h_deg", cfg.theta_h_deg);
      cfg.theta_v_deg = j["lidar"].value("theta_v_deg", cfg.theta_v_deg);
    }
    if (j.contains("classes")) cfg.classes = parse_class_table(j["classes"]);
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.workers = j.value("workers", 1);
    cfg.euler_rate_input = j.value("euler_rate_input", false);
  } catch (const json::exception& e) {
    throw ConfigError("run config error in " + path + ": " + e.what());
  }

  if (cfg.dataset.empty() &&
      (cfg.calibration.empty() || cfg.velocity.empty() || cfg.scans.empty()))
    throw ConfigError(
        "run config needs either a dataset manifest or explicit "
        "calibration/velocity/scans paths");
  cfg.octree.num_classes = cfg.classes.num_eval_classes();
  return cfg;
}

}  // namespace semfuse
