#ifndef SEMFUSE_RUN_CONFIG_HPP
#define SEMFUSE_RUN_CONFIG_HPP

#include <cstdint>
#include <string>

#include "semfuse/class_table.hpp"
#include "semfuse/ego_motion.hpp"
#include "semfuse/semantic_octree.hpp"
#include "semfuse/unscented.hpp"

namespace semfuse {

enum class Strategy {
  kDirect,
  kMotionCorrected,
  kMotionCorrectedMasked,
};

Strategy parse_strategy(const std::string& s);
std::string strategy_name(Strategy s);

struct SlicParams {
  int k = 2048;
  double compactness = 10.0;
  int iterations = 10;
};

/// Batch run configuration (JSON file). Paths are resolved relative to the
/// config file's directory.
struct RunConfig {
  std::string dataset;       // dataset.json from `generate`
  std::string calibration;   // defaults to the dataset's files
  std::string velocity;
  std::string scans;
  std::string ground_truth;  // optional
  Strategy strategy = Strategy::kMotionCorrectedMasked;
  UTParams ut;
  VelocityNoise noise;
  OctreeParams octree;
  SlicParams slic;
  double theta_h_deg = 0.1;
  double theta_v_deg = 2.0;
  ClassTable classes = ClassTable::default_table();
  std::uint64_t seed = 1;
  int workers = 1;
  bool euler_rate_input = false;  // convert Euler-angle rates to body rates

  std::uint64_t config_hash = 0;  // FNV-1a of the config file bytes
};

RunConfig read_run_config(const std::string& path);

/// FNV-1a 64 over a byte string; stable across runs and platforms.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace semfuse

#endif
