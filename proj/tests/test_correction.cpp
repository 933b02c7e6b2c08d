#include <doctest.h>

#include <random>

#include "semfuse/motion_correction.hpp"

#include "oracles.hpp"

using namespace semfuse;

namespace {

LidarPacket make_packet(std::initializer_list<Eigen::Vector3d> pts, double t = 0.0) {
  LidarPacket pk;
  pk.t = t;
  for (const auto& p : pts)
    pk.points.push_back(LidarPoint{static_cast<float>(p.x()),
                                   static_cast<float>(p.y()),
                                   static_cast<float>(p.z()), 0, 0.0f});
  return pk;
}

GaussianState exact_pose(const Pose6& p) {
  return GaussianState{p.vector(), Eigen::MatrixXd::Zero(6, 6)};
}

FisheyeIntrinsics front_cam() {
  FisheyeIntrinsics k;
  k.fx = 350.0;
  k.fy = 350.0;
  k.cx = 255.5;
  k.cy = 191.5;
  k.width = 512;
  k.height = 384;
  return k;
}

// lidar x-forward -> camera z-forward
RigidTransform lidar_to_camera_rotation() {
  Eigen::Matrix3d r;
  r << 0, -1, 0,
       0, 0, -1,
       1, 0, 0;
  return RigidTransform::from_rotation_translation(r, Eigen::Vector3d::Zero());
}

}  // namespace

TEST_SUITE("correction") {

TEST_CASE("zero pose with zero covariance leaves points untouched") {
  const LidarPacket pk =
      make_packet({{5.0, 1.0, -0.5}, {20.0, -3.0, 2.0}, {0.3, 0.2, 0.1}});
  const RigidTransform t_veh_ld =
      pose_to_transform(Pose6{0.5, 0.0, 1.8, 0.0, 0.0, 0.2});
  const CorrectedPacketSigma c =
      correct_packet(pk, exact_pose(Pose6{}), t_veh_ld, UTParams{});
  REQUIRE(c.sigma.size() == 13);
  for (const auto& soa : c.sigma) {
    for (std::size_t j = 0; j < pk.points.size(); ++j) {
      CHECK(std::abs(soa.x[j] - pk.points[j].x) < 1e-12);
      CHECK(std::abs(soa.y[j] - pk.points[j].y) < 1e-12);
      CHECK(std::abs(soa.z[j] - pk.points[j].z) < 1e-12);
    }
  }
  const auto rec = recover_corrected_points(c);
  for (std::size_t j = 0; j < rec.size(); ++j) {
    CHECK(rec[j].cov.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pure translation pose shifts every point by the translation") {
  const LidarPacket pk = make_packet({{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}});
  const CorrectedPacketSigma c = correct_packet(
      pk, exact_pose(Pose6{0.1, 0.0, 0.0, 0.0, 0.0, 0.0}), RigidTransform{},
      UTParams{});
  const auto rec = recover_corrected_points(c);
  CHECK(rec[0].mean.x() == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(rec[1].mean.x() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(rec[1].mean.y() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("sandwich matches a direct 4x4 oracle per point") {
  const Pose6 pose{0.2, -0.1, 0.05, 0.0, 0.0, M_PI / 2};
  const RigidTransform t_veh_ld = RigidTransform::translation(0.5, 0.2, 1.8);
  const LidarPacket pk = make_packet({{4.0, 1.0, 0.3}, {-2.0, 5.0, 1.0}});
  const CorrectedPacketSigma c =
      correct_packet(pk, exact_pose(pose), t_veh_ld, UTParams{});
  const auto rec = recover_corrected_points(c);

  const Eigen::Matrix4d oracle = t_veh_ld.inverse().matrix() *
                                 pose_to_transform(pose).matrix() *
                                 t_veh_ld.matrix();
  for (std::size_t j = 0; j < pk.points.size(); ++j) {
    const Eigen::Vector4d z(pk.points[j].x, pk.points[j].y, pk.points[j].z, 1.0);
    const Eigen::Vector4d expect = oracle * z;
    CHECK((rec[j].mean - expect.head<3>()).norm() < 1e-9);
  }
}

TEST_CASE("affine (translation-only) pose uncertainty passes through exactly") {
  // With rotation fixed at zero, the pose->point map is affine in the pose
  // translation, so UT recovery equals the translation covariance exactly.
  GaussianState pose{Eigen::VectorXd::Zero(6), Eigen::MatrixXd::Zero(6, 6)};
  pose.cov(0, 0) = 0.04;
  pose.cov(1, 1) = 0.01;
  pose.cov(0, 1) = pose.cov(1, 0) = 0.005;
  const LidarPacket pk = make_packet({{7.0, -2.0, 0.5}});
  const CorrectedPacketSigma c =
      correct_packet(pk, pose, RigidTransform{}, UTParams{});
  const auto rec = recover_corrected_points(c);
  // the rank-deficient pose covariance is factored after a ~1e-14 jitter, so
  // the zero directions pick up that much variance
  CHECK((rec[0].cov.topLeftCorner<2, 2>() -
         pose.cov.topLeftCorner<2, 2>()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(rec[0].cov(2, 2) < 1e-12);
}

TEST_CASE("recovered covariance is symmetric PSD") {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 20; ++trial) {
    GaussianState pose{oracles::random_vec(6, rng, 0.05),
                       oracles::random_psd(6, rng, 1e-3)};
    const LidarPacket pk = make_packet({{10.0, 3.0, -1.0}, {2.0, -8.0, 0.2}});
    const auto rec = recover_corrected_points(
        correct_packet(pk, pose, RigidTransform{}, UTParams{}));
    for (const auto& g : rec) {
      CHECK((g.cov - g.cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g.cov);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("projection of an on-axis point with zero covariance") {
  // camera at the lidar origin, z-forward along lidar x
  const LidarPacket pk = make_packet({{5.0, 0.0, 0.0}});
  const CorrectedPacketSigma c =
      correct_packet(pk, exact_pose(Pose6{}), RigidTransform{}, UTParams{});
  const auto rec = recover_corrected_points(c);
  const auto proj = project_corrected(c, 0, rec, lidar_to_camera_rotation(),
                                      front_cam(), nullptr);
  REQUIRE(proj.size() == 1);
  CHECK(proj[0].mean_uv.x() == doctest::Approx(255.5).epsilon(1e-12));
  CHECK(proj[0].mean_uv.y() == doctest::Approx(191.5).epsilon(1e-12));
  CHECK(proj[0].cov_uv.cwiseAbs().maxCoeff() < 1e-15);
  CHECK(proj[0].range == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("projection mean agrees with projecting the corrected mean") {
  const LidarPacket pk = make_packet({{6.0, 1.0, 0.4}, {9.0, -2.0, -0.3}});
  const CorrectedPacketSigma c = correct_packet(
      pk, exact_pose(Pose6{0.15, 0.02, 0.0, 0.0, 0.0, 0.03}),
      RigidTransform::translation(0.2, 0.0, 1.0), UTParams{});
  const auto rec = recover_corrected_points(c);
  const RigidTransform t_cam_ld = lidar_to_camera_rotation();
  const auto proj =
      project_corrected(c, 0, rec, t_cam_ld, front_cam(), nullptr);
  REQUIRE(proj.size() == 2);
  for (const auto& g : proj) {
    const auto direct =
        project_fisheye(front_cam(), t_cam_ld.apply(g.mean_xyz));
    REQUIRE(direct.has_value());
    CHECK((g.mean_uv - *direct).norm() < 1e-9);
  }
}

TEST_CASE("lateral pose noise elongates the pixel covariance along u") {
  GaussianState pose{Eigen::VectorXd::Zero(6), Eigen::MatrixXd::Zero(6, 6)};
  pose.cov(1, 1) = 0.01;  // lidar y = camera -x direction
  const LidarPacket pk = make_packet({{10.0, 0.0, 0.0}});
  const CorrectedPacketSigma c =
      correct_packet(pk, pose, RigidTransform{}, UTParams{});
  const auto rec = recover_corrected_points(c);
  const auto proj = project_corrected(c, 0, rec, lidar_to_camera_rotation(),
                                      front_cam(), nullptr);
  REQUIRE(proj.size() == 1);
  CHECK(proj[0].cov_uv(0, 0) > 1.0);        // u spread
  CHECK(proj[0].cov_uv(1, 1) < 1e-9);       // no v spread

  // Monte-Carlo oracle on the projected pixel covariance
  std::mt19937_64 rng(127);
  std::normal_distribution<double> n(0.0, 0.1);
  const int samples = 100000;
  Eigen::MatrixXd uv(samples, 2);
  const RigidTransform t_cam_ld = lidar_to_camera_rotation();
  for (int s = 0; s < samples; ++s) {
    const Eigen::Vector3d shifted(10.0, n(rng), 0.0);
    uv.row(s) = project_fisheye(front_cam(), t_cam_ld.apply(shifted))->transpose();
  }
  const Eigen::Vector2d mc_mean = uv.colwise().mean();
  Eigen::MatrixXd centered = uv.rowwise() - mc_mean.transpose();
  const Eigen::Matrix2d mc_cov = (centered.transpose() * centered) / (samples - 1);
  CHECK((proj[0].cov_uv - mc_cov).norm() <= 0.1 * mc_cov.norm());
}

TEST_CASE("any sigma position behind the camera excludes the point") {
  GaussianState pose{Eigen::VectorXd::Zero(6), Eigen::MatrixXd::Zero(6, 6)};
  pose.cov(0, 0) = 1.0;  // big forward/backward spread
  const LidarPacket pk = make_packet({{0.4, 0.0, 0.0}, {30.0, 0.0, 0.0}});
  const CorrectedPacketSigma c =
      correct_packet(pk, pose, RigidTransform{}, UTParams{});
  const auto rec = recover_corrected_points(c);
  ProjectionDiagnostics diag;
  const auto proj = project_corrected(c, 0, rec, lidar_to_camera_rotation(),
                                      front_cam(), &diag);
  CHECK(proj.size() == 1);  // the near point has sigma positions behind z=0
  CHECK(diag.behind_camera == 1);
  CHECK(proj[0].index == 1);
}

TEST_CASE("direct projection matches the fisheye model on raw points") {
  const LidarPacket pk = make_packet({{5.0, 0.5, -0.2}, {-1.0, 0.0, 0.0}});
  ProjectionDiagnostics diag;
  const auto proj =
      project_direct(pk, 3, lidar_to_camera_rotation(), front_cam(), &diag);
  REQUIRE(proj.size() == 1);
  CHECK(diag.behind_camera == 1);
  CHECK(proj[0].packet == 3);
  CHECK(proj[0].cov_uv.cwiseAbs().maxCoeff() == 0.0);
}

}  // TEST_SUITE
