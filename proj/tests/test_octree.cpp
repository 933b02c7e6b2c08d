#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "semfuse/semantic_octree.hpp"

using namespace semfuse;

namespace {

OctreeParams params2(int classes = 2) {
  OctreeParams p;
  p.num_classes = classes;
  return p;
}

LabeledPoint labeled_at(const Eigen::Vector3d& xyz,
                        std::initializer_list<double> probs) {
  LabeledPoint lp;
  lp.mean_xyz = xyz;
  lp.class_probs.resize(static_cast<Eigen::Index>(probs.size()));
  int i = 0;
  for (double p : probs) lp.class_probs[i++] = p;
  return lp;
}

std::set<std::tuple<int, int, int>> key_set(const std::vector<VoxelKey>& keys) {
  std::set<std::tuple<int, int, int>> s;
  for (const auto& k : keys) s.insert({k.ix, k.iy, k.iz});
  return s;
}

// Exact oracle: every voxel in the segment's bounding box whose axis slabs
// clip a nonzero parameter interval of the segment.
std::set<std::tuple<int, int, int>> slab_oracle(const Eigen::Vector3d& a,
                                                const Eigen::Vector3d& b,
                                                double res) {
  std::set<std::tuple<int, int, int>> out;
  const auto key_of = [res](const Eigen::Vector3d& p) {
    return std::array<int, 3>{static_cast<int>(std::floor(p.x() / res)),
                              static_cast<int>(std::floor(p.y() / res)),
                              static_cast<int>(std::floor(p.z() / res))};
  };
  const auto ka = key_of(a), kb = key_of(b);
  const Eigen::Vector3d d = b - a;
  for (int ix = std::min(ka[0], kb[0]); ix <= std::max(ka[0], kb[0]); ++ix)
    for (int iy = std::min(ka[1], kb[1]); iy <= std::max(ka[1], kb[1]); ++iy)
      for (int iz = std::min(ka[2], kb[2]); iz <= std::max(ka[2], kb[2]); ++iz) {
        double t0 = 0.0, t1 = 1.0;
        const int idx[3] = {ix, iy, iz};
        bool ok = true;
        for (int axis = 0; axis < 3; ++axis) {
          const double lo = idx[axis] * res, hi = (idx[axis] + 1) * res;
          if (std::abs(d[axis]) < 1e-15) {
            if (a[axis] < lo || a[axis] >= hi) ok = false;
            continue;
          }
          double ta = (lo - a[axis]) / d[axis];
          double tb = (hi - a[axis]) / d[axis];
          if (ta > tb) std::swap(ta, tb);
          t0 = std::max(t0, ta);
          t1 = std::min(t1, tb);
        }
        if (ok && t0 < t1 - 1e-12) out.insert({ix, iy, iz});
      }
  // origin and endpoint voxels are excluded by contract
  out.erase({ka[0], ka[1], ka[2]});
  out.erase({kb[0], kb[1], kb[2]});
  return out;
}

}  // namespace

TEST_SUITE("octree") {

TEST_CASE("log-odds hit update from a fresh voxel") {
  const OctreeParams p = params2();
  SemanticVoxel v;
  v = update_occupancy(v, Observation::kHit, p);
  CHECK(v.log_odds == doctest::Approx(std::log(0.7 / 0.3)).epsilon(1e-12));
  CHECK(v.observation_count == 1);
}

TEST_CASE("alternating hit/miss drifts by the documented amount") {
  const OctreeParams p = params2();
  SemanticVoxel v;
  const double drift = std::log(7.0 / 3.0) + std::log(2.0 / 3.0);
  CHECK(drift == doctest::Approx(0.4418).epsilon(1e-3));
  for (int i = 0; i < 3; ++i) {
    v = update_occupancy(v, Observation::kHit, p);
    v = update_occupancy(v, Observation::kMiss, p);
  }
  CHECK(v.log_odds == doctest::Approx(3 * drift).epsilon(1e-9));
}

TEST_CASE("log-odds clamps at the configured bounds") {
  const OctreeParams p = params2();
  SemanticVoxel v;
  for (int i = 0; i < 100; ++i) v = update_occupancy(v, Observation::kHit, p);
  CHECK(v.log_odds == p.l_max);
  for (int i = 0; i < 200; ++i) v = update_occupancy(v, Observation::kMiss, p);
  CHECK(v.log_odds == p.l_min);
}

TEST_CASE("discrete Bayes semantics") {
  const OctreeParams p = params2();
  SUBCASE("uniform prior passes the likelihood through") {
    SemanticVoxel v;
    v.class_probs = {0.5, 0.5};
    v = update_semantics(v, std::vector<double>{0.9, 0.1}, p);
    CHECK(v.class_probs[0] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(v.class_probs[1] == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("repeated consistent likelihood sharpens") {
    SemanticVoxel v;
    v.class_probs = {0.9, 0.1};
    v = update_semantics(v, std::vector<double>{0.9, 0.1}, p);
    CHECK(v.class_probs[0] == doctest::Approx(0.81 / 0.82).epsilon(1e-9));
    CHECK(v.class_probs[1] == doctest::Approx(0.01 / 0.82).epsilon(1e-9));
  }
  SUBCASE("uniform likelihood leaves the prior unchanged") {
    SemanticVoxel v;
    v.class_probs = {0.7, 0.3};
    v = update_semantics(v, std::vector<double>{0.5, 0.5}, p);
    CHECK(v.class_probs[0] == doctest::Approx(0.7).epsilon(1e-12));
  }
  SUBCASE("epsilon floor keeps zero likelihood from absorbing") {
    SemanticVoxel v;
    v.class_probs = {0.5, 0.5};
    for (int i = 0; i < 5; ++i)
      v = update_semantics(v, std::vector<double>{1.0, 0.0}, p);
    CHECK(v.class_probs[1] > 0.0);
    v = update_semantics(v, std::vector<double>{0.0, 1.0}, p);
    CHECK(v.class_probs[1] > 0.0);  // can still recover
  }
}

TEST_CASE("simplex preserved under random update streams") {
  std::mt19937_64 rng(149);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const OctreeParams p = params2(5);
  SemanticVoxel v;
  v.class_probs = {0.2, 0.2, 0.2, 0.2, 0.2};
  for (int step = 0; step < 500; ++step) {
    std::vector<double> like(5);
    double sum = 0.0;
    for (double& x : like) sum += (x = u(rng));
    for (double& x : like) x /= sum;
    v = update_semantics(v, like, p);
    double total = 0.0;
    for (double x : v.class_probs) {
      CHECK(x >= 0.0);
      total += x;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("traverse_ray basics") {
  SUBCASE("endpoint inside the origin voxel: no ray") {
    CHECK(traverse_ray({0.02, 0.02, 0.02}, {0.08, 0.05, 0.03}, 0.1).empty());
  }
  SUBCASE("axis-aligned 1 m ray on a 0.1 m grid: 9 strictly-between voxels") {
    const auto keys = traverse_ray({0.05, 0.05, 0.05}, {1.05, 0.05, 0.05}, 0.1);
    CHECK(keys.size() == 9);  // voxels 1..9; origin 0 and endpoint 10 excluded
    for (int i = 0; i < 9; ++i) {
      CHECK(keys[i].ix == i + 1);
      CHECK(keys[i].iy == 0);
      CHECK(keys[i].iz == 0);
    }
  }
}

TEST_CASE("ray traversal matches the exact slab oracle on random rays") {
  std::mt19937_64 rng(151);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Vector3d a(u(rng), u(rng), u(rng));
    const Eigen::Vector3d b(u(rng), u(rng), u(rng));
    const auto keys = traverse_ray(a, b, 0.1);
    const auto got = key_set(keys);
    CHECK(got.size() == keys.size());  // no duplicates
    const auto expect = slab_oracle(a, b, 0.1);
    CHECK(got == expect);
  }
}

TEST_CASE("ray traversal matches a dense supersampling oracle") {
  std::mt19937_64 rng(157);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Vector3d a(u(rng), u(rng), u(rng));
    const Eigen::Vector3d b(u(rng), u(rng), u(rng));
    const auto got = key_set(traverse_ray(a, b, 0.1));
    // dense samples along the segment must all fall in traversed voxels
    // (or in the excluded origin/endpoint voxels)
    const auto ka = std::make_tuple(static_cast<int>(std::floor(a.x() / 0.1)),
                                    static_cast<int>(std::floor(a.y() / 0.1)),
                                    static_cast<int>(std::floor(a.z() / 0.1)));
    const auto kb = std::make_tuple(static_cast<int>(std::floor(b.x() / 0.1)),
                                    static_cast<int>(std::floor(b.y() / 0.1)),
                                    static_cast<int>(std::floor(b.z() / 0.1)));
    const int steps = 20000;
    for (int s = 0; s < steps; ++s) {
      const Eigen::Vector3d p = a + (b - a) * (static_cast<double>(s) / steps);
      const auto k = std::make_tuple(static_cast<int>(std::floor(p.x() / 0.1)),
                                     static_cast<int>(std::floor(p.y() / 0.1)),
                                     static_cast<int>(std::floor(p.z() / 0.1)));
      CHECK((got.count(k) == 1 || k == kb || k == ka));
    }
  }
}

TEST_CASE("insert_scan: single point a meter out") {
  SemanticOctree tree(params2());
  const auto summary = tree.insert_scan(
      {0.05, 0.05, 0.05}, std::vector<LabeledPoint>{
                              labeled_at({1.05, 0.05, 0.05}, {0.8, 0.2})});
  CHECK(summary.hits == 1);
  CHECK(summary.misses == 9);
  const SemanticVoxel* hit = tree.find(VoxelKey{10, 0, 0});
  REQUIRE(hit != nullptr);
  CHECK(hit->log_odds == doctest::Approx(std::log(0.7 / 0.3)));
  CHECK(hit->class_probs[0] == doctest::Approx(0.8));
  const SemanticVoxel* miss = tree.find(VoxelKey{4, 0, 0});
  REQUIRE(miss != nullptr);
  CHECK(miss->log_odds == doctest::Approx(std::log(0.4 / 0.6)));
  CHECK(miss->class_probs.empty());
}

TEST_CASE("endpoint in the origin voxel: hit only, no ray") {
  SemanticOctree tree(params2());
  const auto summary = tree.insert_scan(
      {0.02, 0.02, 0.02},
      std::vector<LabeledPoint>{labeled_at({0.06, 0.02, 0.02}, {1.0, 0.0})});
  CHECK(summary.hits == 1);
  CHECK(summary.misses == 0);
  CHECK(tree.voxel_count() == 1);
}

TEST_CASE("same-scan dedup: one hit, averaged class distribution") {
  SemanticOctree tree(params2());
  std::vector<LabeledPoint> pts{labeled_at({1.02, 0.05, 0.05}, {1.0, 0.0}),
                                labeled_at({1.07, 0.05, 0.05}, {0.0, 1.0})};
  const auto summary = tree.insert_scan({0.05, 0.05, 0.05}, pts);
  CHECK(summary.hits == 1);
  const SemanticVoxel* v = tree.find(VoxelKey{10, 0, 0});
  REQUIRE(v != nullptr);
  CHECK(v->observation_count == 1);  // single occupancy update
  CHECK(v->class_probs[0] == doctest::Approx(0.5));  // averaged (1,0) and (0,1)
}

TEST_CASE("hit wins over a miss in the same scan") {
  SemanticOctree tree(params2());
  // one ray passes through the voxel another ray ends in
  std::vector<LabeledPoint> pts{labeled_at({2.05, 0.05, 0.05}, {1.0, 0.0}),
                                labeled_at({1.05, 0.05, 0.05}, {1.0, 0.0})};
  tree.insert_scan({0.05, 0.05, 0.05}, pts);
  const SemanticVoxel* v = tree.find(VoxelKey{10, 0, 0});
  REQUIRE(v != nullptr);
  CHECK(v->log_odds > 0.0);  // hit applied, not the miss
}

TEST_CASE("20 consistent observations exceed 0.99 with wide clamps") {
  OctreeParams p = params2();
  p.l_min = -7.0;
  p.l_max = 7.0;
  SemanticOctree tree(p);
  for (int i = 0; i < 20; ++i)
    tree.insert_scan({0.05, 0.05, 0.05}, std::vector<LabeledPoint>{labeled_at(
                                             {1.05, 0.05, 0.05}, {0.9, 0.1})});
  const SemanticVoxel* v = tree.find(VoxelKey{10, 0, 0});
  REQUIRE(v != nullptr);
  const double occ = 1.0 / (1.0 + std::exp(-v->log_odds));
  CHECK(occ > 0.99);
  CHECK(v->class_probs[0] > 0.99);
}

TEST_CASE("dynamic objects decay below the threshold under clearing rays") {
  SemanticOctree tree(params2());
  tree.insert_scan({0.05, 0.05, 0.05}, std::vector<LabeledPoint>{labeled_at(
                                           {1.05, 0.05, 0.05}, {1.0, 0.0})});
  for (int i = 0; i < 10; ++i)
    tree.insert_scan({0.05, 0.05, 0.05}, std::vector<LabeledPoint>{labeled_at(
                                             {2.05, 0.05, 0.05}, {1.0, 0.0})});
  const SemanticVoxel* v = tree.find(VoxelKey{10, 0, 0});
  REQUIRE(v != nullptr);
  CHECK(v->log_odds < tree.params().l_threshold());
  // the voxel disappears from the occupied export
  for (const auto& e : tree.to_point_cloud())
    CHECK(!(e.key == VoxelKey{10, 0, 0}));
}

TEST_CASE("export lists occupied voxels with centers, ordered by key") {
  SemanticOctree tree(params2());
  CHECK(tree.to_point_cloud().empty());
  tree.insert_scan({0.05, 0.05, 0.05},
                   std::vector<LabeledPoint>{labeled_at({0.05, 0.05, 0.05}, {1.0, 0.0})});
  const auto cloud = tree.to_point_cloud();
  REQUIRE(cloud.size() == 1);
  CHECK(cloud[0].key == VoxelKey{0, 0, 0});
  CHECK(cloud[0].center.x() == doctest::Approx(0.05));
  CHECK(cloud[0].center.y() == doctest::Approx(0.05));
  CHECK(cloud[0].center.z() == doctest::Approx(0.05));
}

TEST_CASE("snapshot round trip") {
  SemanticOctree tree(params2());
  std::mt19937_64 rng(163);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    tree.insert_scan({0.0, 0.0, 0.0},
                     std::vector<LabeledPoint>{labeled_at(
                         {u(rng), u(rng), std::abs(u(rng))}, {0.6, 0.4})});
  }
  const std::string path = "/tmp/semfuse_test_map.bin";
  tree.save(path);
  const SemanticOctree back = SemanticOctree::load(path);
  CHECK(back.voxel_count() == tree.voxel_count());
  const auto a = tree.to_point_cloud();
  const auto b = back.to_point_cloud();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].key == b[i].key);
    CHECK(a[i].occupancy ==
          doctest::Approx(b[i].occupancy).epsilon(1e-6));  // f32 storage
  }
}

}  // TEST_SUITE
