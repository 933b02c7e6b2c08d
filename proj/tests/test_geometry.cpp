#include <doctest.h>

#include <random>

#include "semfuse/geometry.hpp"

using namespace semfuse;

namespace {

RigidTransform random_rigid(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  std::uniform_real_distribution<double> tr(-10.0, 10.0);
  return pose_to_transform(
      Pose6{tr(rng), tr(rng), tr(rng), ang(rng), ang(rng), ang(rng)});
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("zero pose gives the identity transform") {
  const RigidTransform t = pose_to_transform(Pose6{});
  CHECK((t.matrix() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pure translation pose") {
  const RigidTransform t = pose_to_transform(Pose6{1, 2, 3, 0, 0, 0});
  CHECK(t.rotation().isApprox(Eigen::Matrix3d::Identity(), 1e-15));
  CHECK(t.trans() == Eigen::Vector3d(1, 2, 3));
}

TEST_CASE("quarter turn about z maps x to y") {
  const RigidTransform t = pose_to_transform(Pose6{0, 0, 0, 0, 0, M_PI / 2});
  const Eigen::Vector3d p = t.apply(Eigen::Vector3d(1, 0, 0));
  CHECK(p.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.y() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.z() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("compose with identity and with inverse") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const RigidTransform t = random_rigid(rng);
    CHECK((t * RigidTransform()).matrix().isApprox(t.matrix(), 1e-12));
    const Eigen::Matrix4d round = (t * t.inverse()).matrix();
    CHECK((round - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("compose of two translations adds") {
  const RigidTransform t =
      RigidTransform::translation(1, 0, 0) * RigidTransform::translation(0, 1, 0);
  CHECK(t.trans() == Eigen::Vector3d(1, 1, 0));
}

TEST_CASE("inverse of a pure translation negates it") {
  const RigidTransform t = RigidTransform::translation(1, 2, 3).inverse();
  CHECK(t.trans() == Eigen::Vector3d(-1, -2, -3));
  CHECK(t.rotation() == Eigen::Matrix3d::Identity());
}

TEST_CASE("inverse is an involution") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 50; ++i) {
    const RigidTransform t = random_rigid(rng);
    CHECK((t.inverse().inverse().matrix() - t.matrix()).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("rotation stays orthonormal with det +1") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const RigidTransform t = random_rigid(rng);
    CHECK(std::abs(t.rotation().determinant() - 1.0) < 1e-9);
    CHECK(t.is_rigid(1e-9));
  }
}

TEST_CASE("pose round trip through the matrix form") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ang(-1.4, 1.4);  // clear of gimbal lock
  std::uniform_real_distribution<double> tr(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const Pose6 p{tr(rng), tr(rng), tr(rng), ang(rng), ang(rng), ang(rng)};
    const Pose6 q = transform_to_pose(pose_to_transform(p));
    CHECK(q.x == doctest::Approx(p.x).epsilon(1e-12));
    CHECK(q.roll == doctest::Approx(p.roll).epsilon(1e-10));
    CHECK(q.pitch == doctest::Approx(p.pitch).epsilon(1e-10));
    CHECK(q.yaw == doctest::Approx(p.yaw).epsilon(1e-10));
  }
}

TEST_CASE("from_matrix rejects non-rigid input") {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 0) = 2.0;
  CHECK_THROWS_AS(RigidTransform::from_matrix(m), std::invalid_argument);
}

TEST_CASE("normalize_angle wraps into (-pi, pi]") {
  CHECK(normalize_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(normalize_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(normalize_angle(3 * M_PI) == doctest::Approx(M_PI));
  CHECK(normalize_angle(0.1 + 4 * M_PI) == doctest::Approx(0.1));
}

TEST_CASE("exp_se3 of the zero twist is identity") {
  const Eigen::Matrix4d m =
      exp_se3(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero());
  CHECK((m - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exp_se3 inverse property") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.0, 0.5);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d w(n(rng), n(rng), n(rng));
    const Eigen::Vector3d v(n(rng), n(rng), n(rng));
    const Eigen::Matrix4d round = exp_se3(w, v) * exp_se3(-w, -v);
    CHECK((round - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("exp_se3 small-angle series agrees with the closed form") {
  const Eigen::Vector3d w(1e-7, -2e-7, 5e-8);
  const Eigen::Vector3d v(1.0, 2.0, 3.0);
  const Eigen::Matrix4d m = exp_se3(w, v);
  // rotation ~ I + [w]x
  CHECK((m.topLeftCorner<3, 3>() - (Eigen::Matrix3d::Identity() + skew(w)))
            .cwiseAbs()
            .maxCoeff() < 1e-13);
  CHECK((m.topRightCorner<3, 1>() - v).cwiseAbs().maxCoeff() < 1e-6);
}

}  // TEST_SUITE
