#include "semfuse/semantic_octree.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "semfuse/errors.hpp"

namespace semfuse {

double OctreeParams::l_hit() const { return std::log(p_hit / (1.0 - p_hit)); }
double OctreeParams::l_miss() const { return std::log(p_miss / (1.0 - p_miss)); }
double OctreeParams::l_threshold() const {
  return std::log(occupancy_threshold / (1.0 - occupancy_threshold));
}

SemanticVoxel update_occupancy(SemanticVoxel v, Observation obs,
                               const OctreeParams& p) {
  v.log_odds += (obs == Observation::kHit) ? p.l_hit() : p.l_miss();
  v.log_odds = std::clamp(v.log_odds, p.l_min, p.l_max);
  ++v.observation_count;
  return v;
}

SemanticVoxel update_semantics(SemanticVoxel v, std::span<const double> likelihood,
                               const OctreeParams& p) {
  if (v.class_probs.empty()) {
    v.class_probs.assign(likelihood.begin(), likelihood.end());
    double sum = 0.0;
    for (double x : v.class_probs) sum += x;
    if (sum > 0.0)
      for (double& x : v.class_probs) x /= sum;
    return v;
  }
  if (v.class_probs.size() != likelihood.size())
    throw std::invalid_argument("update_semantics: class count mismatch");
  double sum = 0.0;
  for (std::size_t c = 0; c < likelihood.size(); ++c) {
    v.class_probs[c] *= std::max(likelihood[c], p.epsilon);
    sum += v.class_probs[c];
  }
  for (double& x : v.class_probs) x /= sum;
  return v;
}

std::vector<VoxelKey> traverse_ray(const Eigen::Vector3d& a,
                                   const Eigen::Vector3d& b,
                                   double resolution) {
  const double inv_res = 1.0 / resolution;
  auto key_of = [inv_res](const Eigen::Vector3d& p) {
    return VoxelKey{static_cast<std::int32_t>(std::floor(p.x() * inv_res)),
                    static_cast<std::int32_t>(std::floor(p.y() * inv_res)),
                    static_cast<std::int32_t>(std::floor(p.z() * inv_res))};
  };
  const VoxelKey start = key_of(a);
  const VoxelKey goal = key_of(b);
  std::vector<VoxelKey> out;
  if (start == goal) return out;

  const Eigen::Vector3d dir = b - a;
  const double len = dir.norm();
  VoxelKey cur = start;

  std::int32_t step[3];
  double t_max[3], t_delta[3];
  const std::int32_t curi[3] = {cur.ix, cur.iy, cur.iz};
  for (int i = 0; i < 3; ++i) {
    const double d = dir[i];
    if (d > 0.0) {
      step[i] = 1;
      const double boundary = (curi[i] + 1) * resolution;
      t_max[i] = (boundary - a[i]) / d;
      t_delta[i] = resolution / d;
    } else if (d < 0.0) {
      step[i] = -1;
      const double boundary = curi[i] * resolution;
      t_max[i] = (boundary - a[i]) / d;
      t_delta[i] = -resolution / d;
    } else {
      step[i] = 0;
      t_max[i] = std::numeric_limits<double>::infinity();
      t_delta[i] = std::numeric_limits<double>::infinity();
    }
  }

  // Walk from the origin voxel to the endpoint voxel, collecting the strictly
  // intermediate voxels; bail out defensively after the manhattan bound in
  // case roundoff strands the stepping.
  const long max_steps = 3 + std::labs(goal.ix - start.ix) +
                         std::labs(goal.iy - start.iy) +
                         std::labs(goal.iz - start.iz);
  (void)len;
  for (long s = 0; s < max_steps; ++s) {
    if (!(cur == start)) out.push_back(cur);
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    if (axis == 0) cur.ix += step[0];
    else if (axis == 1) cur.iy += step[1];
    else cur.iz += step[2];
    t_max[axis] += t_delta[axis];
    if (cur == goal) break;
  }
  return out;
}

SemanticOctree::SemanticOctree(const OctreeParams& params) : params_(params) {
  if (!(params_.resolution > 0.0))
    throw std::invalid_argument("SemanticOctree: resolution must be positive");
}

const SemanticVoxel* SemanticOctree::find(const VoxelKey& k) const {
  const auto it = voxels_.find(k);
  return it == voxels_.end() ? nullptr : &it->second;
}

VoxelKey SemanticOctree::key_of(const Eigen::Vector3d& p) const {
  const double inv = 1.0 / params_.resolution;
  return VoxelKey{static_cast<std::int32_t>(std::floor(p.x() * inv)),
                  static_cast<std::int32_t>(std::floor(p.y() * inv)),
                  static_cast<std::int32_t>(std::floor(p.z() * inv))};
}

Eigen::Vector3d SemanticOctree::center_of(const VoxelKey& k) const {
  const double r = params_.resolution;
  return Eigen::Vector3d((k.ix + 0.5) * r, (k.iy + 0.5) * r, (k.iz + 0.5) * r);
}

InsertSummary SemanticOctree::insert_scan(const Eigen::Vector3d& origin,
                                          std::span<const LabeledPoint> points) {
  // Per-scan deduplication: at most one miss and one hit per voxel, hit wins;
  // multiple hits average their class distributions.
  struct HitAccum {
    std::vector<double> probs;
    std::uint32_t n = 0;
  };
  std::unordered_map<VoxelKey, HitAccum, VoxelKeyHash> hits;
  std::unordered_map<VoxelKey, std::uint8_t, VoxelKeyHash> misses;

  InsertSummary summary;
  for (const auto& p : points) {
    ++summary.points;
    const VoxelKey end = key_of(p.mean_xyz);
    auto& acc = hits[end];
    if (acc.n == 0) {
      acc.probs.assign(p.class_probs.data(),
                       p.class_probs.data() + p.class_probs.size());
    } else {
      for (Eigen::Index c = 0; c < p.class_probs.size(); ++c)
        acc.probs[static_cast<std::size_t>(c)] += p.class_probs[c];
    }
    ++acc.n;
    for (const VoxelKey& k : traverse_ray(origin, p.mean_xyz, params_.resolution))
      misses.emplace(k, std::uint8_t{1});
  }

  for (auto& [key, acc] : hits) {
    auto& v = voxels_[key];
    v = update_occupancy(std::move(v), Observation::kHit, params_);
    std::vector<double> mean(acc.probs.size());
    for (std::size_t c = 0; c < acc.probs.size(); ++c)
      mean[c] = acc.probs[c] / acc.n;
    v = update_semantics(std::move(v), mean, params_);
    ++summary.hits;
  }
  for (const auto& [key, one] : misses) {
    (void)one;
    if (hits.count(key)) continue;  // hit wins
    auto& v = voxels_[key];
    v = update_occupancy(std::move(v), Observation::kMiss, params_);
    ++summary.misses;
  }
  return summary;
}

std::vector<VoxelExport> SemanticOctree::to_point_cloud() const {
  std::vector<VoxelExport> out;
  const double lt = params_.l_threshold();
  for (const auto& [key, v] : voxels_) {
    if (v.log_odds > lt) {
      VoxelExport e;
      e.key = key;
      e.center = center_of(key);
      e.occupancy = 1.0 / (1.0 + std::exp(-v.log_odds));
      e.class_probs = v.class_probs;
      out.push_back(std::move(e));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const VoxelExport& a, const VoxelExport& b) { return a.key < b.key; });
  return out;
}

void SemanticOctree::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write map snapshot: " + path);
  out.write("SFMP", 4);
  const double res = params_.resolution;
  out.write(reinterpret_cast<const char*>(&res), 8);
  const std::uint32_t c = static_cast<std::uint32_t>(params_.num_classes);
  out.write(reinterpret_cast<const char*>(&c), 4);
  const std::uint64_t n = voxels_.size();
  out.write(reinterpret_cast<const char*>(&n), 8);

  std::vector<const std::pair<const VoxelKey, SemanticVoxel>*> entries;
  entries.reserve(voxels_.size());
  for (const auto& kv : voxels_) entries.push_back(&kv);
  std::sort(entries.begin(), entries.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });

  for (const auto* kv : entries) {
    out.write(reinterpret_cast<const char*>(&kv->first.ix), 4);
    out.write(reinterpret_cast<const char*>(&kv->first.iy), 4);
    out.write(reinterpret_cast<const char*>(&kv->first.iz), 4);
    const float lo = static_cast<float>(kv->second.log_odds);
    out.write(reinterpret_cast<const char*>(&lo), 4);
    for (std::uint32_t i = 0; i < c; ++i) {
      const float p = i < kv->second.class_probs.size()
                          ? static_cast<float>(kv->second.class_probs[i])
                          : 0.0f;
      out.write(reinterpret_cast<const char*>(&p), 4);
    }
  }
}

SemanticOctree SemanticOctree::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open map snapshot: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "SFMP", 4) != 0)
    throw DataError("not a map snapshot (bad magic): " + path);
  double res;
  std::uint32_t c;
  std::uint64_t n;
  if (!in.read(reinterpret_cast<char*>(&res), 8) ||
      !in.read(reinterpret_cast<char*>(&c), 4) ||
      !in.read(reinterpret_cast<char*>(&n), 8))
    throw DataError("truncated map snapshot: " + path);
  OctreeParams params;
  params.resolution = res;
  params.num_classes = static_cast<int>(c);
  SemanticOctree tree(params);
  for (std::uint64_t i = 0; i < n; ++i) {
    VoxelKey key;
    float lo;
    if (!in.read(reinterpret_cast<char*>(&key.ix), 4) ||
        !in.read(reinterpret_cast<char*>(&key.iy), 4) ||
        !in.read(reinterpret_cast<char*>(&key.iz), 4) ||
        !in.read(reinterpret_cast<char*>(&lo), 4))
      throw DataError("truncated map snapshot: " + path);
    SemanticVoxel v;
    v.log_odds = lo;
    v.class_probs.resize(c);
    bool any = false;
    for (std::uint32_t j = 0; j < c; ++j) {
      float p;
      if (!in.read(reinterpret_cast<char*>(&p), 4))
        throw DataError("truncated map snapshot: " + path);
      v.class_probs[j] = p;
      if (p != 0.0f) any = true;
    }
    if (!any) v.class_probs.clear();
    tree.voxels_.emplace(key, std::move(v));
  }
  return tree;
}

}  // namespace semfuse
