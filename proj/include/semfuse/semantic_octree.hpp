#ifndef SEMFUSE_SEMANTIC_OCTREE_HPP
#define SEMFUSE_SEMANTIC_OCTREE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "semfuse/occlusion.hpp"

namespace semfuse {

struct VoxelKey {
  std::int32_t ix = 0;
  std::int32_t iy = 0;
  std::int32_t iz = 0;

  friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
  friend auto operator<=>(const VoxelKey&, const VoxelKey&) = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint32_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    mix(static_cast<std::uint32_t>(k.ix));
    mix(static_cast<std::uint32_t>(k.iy));
    mix(static_cast<std::uint32_t>(k.iz));
    return static_cast<std::size_t>(h);
  }
};

struct SemanticVoxel {
  double log_odds = 0.0;
  std::vector<double> class_probs;  // empty until the first hit
  std::uint32_t observation_count = 0;
};

struct OctreeParams {
  double resolution = 0.1;  // m
  int num_classes = 0;
  double p_hit = 0.7;
  double p_miss = 0.4;
  double l_min = -3.5;
  double l_max = 3.5;
  double occupancy_threshold = 0.5;  // probability
  double epsilon = 1e-3;             // discrete-Bayes likelihood floor

  double l_hit() const;
  double l_miss() const;
  double l_threshold() const;  // log-odds of occupancy_threshold
};

enum class Observation { kHit, kMiss };

/// Binary Bayes log-odds update, clamped to [l_min, l_max].
SemanticVoxel update_occupancy(SemanticVoxel v, Observation obs,
                               const OctreeParams& p);

/// Discrete Bayes class update: posterior_c proportional to
/// prior_c * max(l_c, epsilon), renormalized. A voxel without a prior yet
/// adopts the likelihood directly.
SemanticVoxel update_semantics(SemanticVoxel v, std::span<const double> likelihood,
                               const OctreeParams& p);

/// Voxels crossed by the segment from a to b, strictly between the origin
/// voxel and the endpoint voxel (both excluded). Integer grid stepping
/// (Amanatides-Woo).
std::vector<VoxelKey> traverse_ray(const Eigen::Vector3d& a,
                                   const Eigen::Vector3d& b, double resolution);

struct InsertSummary {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t points = 0;
};

struct VoxelExport {
  VoxelKey key;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double occupancy = 0.0;  // probability
  std::vector<double> class_probs;
};

/// Sparse voxel map over the finest level, keyed by VoxelKey. Single writer;
/// reads are safe with no writer active.
class SemanticOctree {
 public:
  explicit SemanticOctree(const OctreeParams& params);

  const OctreeParams& params() const { return params_; }
  std::size_t voxel_count() const { return voxels_.size(); }
  const SemanticVoxel* find(const VoxelKey& k) const;

  VoxelKey key_of(const Eigen::Vector3d& p) const;
  Eigen::Vector3d center_of(const VoxelKey& k) const;

  /// Ray-cast every point from the sensor origin (map frame): voxels along
  /// the ray collect one miss per scan, the endpoint voxel one hit plus a
  /// semantic update per scan (multiple hits in one voxel average their class
  /// distributions; a hit wins over a miss).
  InsertSummary insert_scan(const Eigen::Vector3d& origin,
                            std::span<const LabeledPoint> points);

  /// Occupied voxels (log-odds above the threshold), ordered by key.
  std::vector<VoxelExport> to_point_cloud() const;

  /// Snapshot: "SFMP", f64 resolution, u32 c, u64 count, then per voxel
  /// {3 x i32 key, f32 log_odds, c x f32 probs}.
  void save(const std::string& path) const;
  static SemanticOctree load(const std::string& path);

 private:
  OctreeParams params_;
  std::unordered_map<VoxelKey, SemanticVoxel, VoxelKeyHash> voxels_;
};

}  // namespace semfuse

#endif
