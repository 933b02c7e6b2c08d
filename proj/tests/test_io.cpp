#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "semfuse/calib_io.hpp"
#include "semfuse/errors.hpp"
#include "semfuse/image.hpp"
#include "semfuse/labeled_points_io.hpp"
#include "semfuse/lidar_scan.hpp"
#include "semfuse/semantic_probability.hpp"

using namespace semfuse;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("semfuse_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("io") {

TEST_CASE("score map round trip and validation") {
  TempDir dir;
  std::mt19937_64 rng(167);
  std::uniform_real_distribution<float> u(-5.0f, 5.0f);
  ScoreMap s;
  s.classes = 3;
  s.height = 7;
  s.width = 5;
  s.scores.resize(3 * 35);
  for (auto& v : s.scores) v = u(rng);
  write_score_map(dir.file("a.sfsm"), s);
  const ScoreMap back = read_score_map(dir.file("a.sfsm"));
  CHECK(back.classes == 3);
  CHECK(back.height == 7);
  CHECK(back.width == 5);
  CHECK(back.scores == s.scores);

  CHECK_THROWS_AS(read_score_map(dir.file("missing.sfsm")), DataError);
  // wrong magic
  write_label_image(dir.file("b.sfli"), LabelImage{1, 1, {0}}, 1);
  CHECK_THROWS_AS(read_score_map(dir.file("b.sfli")), DataError);
}

TEST_CASE("label image and superpixel map round trips") {
  TempDir dir;
  LabelImage l;
  l.height = 4;
  l.width = 6;
  l.labels = {0, 1, 2, 3, 4, 5, 5, 4, 3, 2, 1, 0,
              0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5};
  write_label_image(dir.file("l.sfli"), l, 6);
  std::uint32_t classes = 0;
  const LabelImage lb = read_label_image(dir.file("l.sfli"), &classes);
  CHECK(classes == 6);
  CHECK(lb.labels == l.labels);

  SuperpixelMap sp;
  sp.height = 2;
  sp.width = 3;
  sp.count = 3;
  sp.ids = {0, 1, 2, 0, 1, 2};
  write_superpixel_map(dir.file("s.sfsp"), sp);
  const SuperpixelMap spb = read_superpixel_map(dir.file("s.sfsp"));
  CHECK(spb.count == 3);
  CHECK(spb.ids == sp.ids);
}

TEST_CASE("ppm and pgm16 round trips are lossless") {
  TempDir dir;
  std::mt19937_64 rng(173);
  ImageU8 img;
  img.height = 9;
  img.width = 13;
  img.rgb.resize(3 * 9 * 13);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng() % 256);
  write_ppm(dir.file("i.ppm"), img);
  const ImageU8 back = read_ppm(dir.file("i.ppm"));
  CHECK(back.height == 9);
  CHECK(back.width == 13);
  CHECK(back.rgb == img.rgb);

  std::vector<std::uint16_t> gray(77);
  for (auto& v : gray) v = static_cast<std::uint16_t>(rng() % 65536);
  write_pgm16(dir.file("g.pgm"), 7, 11, gray);
  int h = 0, w = 0;
  const auto gb = read_pgm16(dir.file("g.pgm"), h, w);
  CHECK(h == 7);
  CHECK(w == 11);
  CHECK(gb == gray);
}

TEST_CASE("lidar scan binary round trip") {
  TempDir dir;
  std::mt19937_64 rng(179);
  std::uniform_real_distribution<float> u(-30.0f, 30.0f);
  std::vector<LidarScan> scans(2);
  double t = 0.0;
  for (auto& scan : scans) {
    for (int p = 0; p < 3; ++p) {
      LidarPacket pk;
      pk.t = (t += 0.01);
      const int m = 1 + static_cast<int>(rng() % 5);
      for (int j = 0; j < m; ++j)
        pk.points.push_back(LidarPoint{u(rng), u(rng), u(rng),
                                       static_cast<std::uint8_t>(rng() % 16),
                                       u(rng)});
      scan.packets.push_back(std::move(pk));
    }
  }
  write_scans(dir.file("s.bin"), scans);
  const auto back = read_scans(dir.file("s.bin"));
  REQUIRE(back.size() == 2);
  for (int s = 0; s < 2; ++s) {
    REQUIRE(back[s].packets.size() == 3);
    for (int p = 0; p < 3; ++p) {
      CHECK(back[s].packets[p].t == scans[s].packets[p].t);
      REQUIRE(back[s].packets[p].points.size() == scans[s].packets[p].points.size());
      for (std::size_t j = 0; j < scans[s].packets[p].points.size(); ++j) {
        CHECK(back[s].packets[p].points[j].x == scans[s].packets[p].points[j].x);
        CHECK(back[s].packets[p].points[j].ring == scans[s].packets[p].points[j].ring);
      }
    }
  }
}

TEST_CASE("lidar scan csv import") {
  TempDir dir;
  {
    std::ofstream out(dir.file("s.csv"));
    out << "scan,packet_t,x,y,z,ring,azimuth\n";
    out << "0,0.00,1.0,2.0,3.0,4,0.5\n";
    out << "0,0.00,1.5,2.5,3.5,5,0.6\n";
    out << "0,0.01,9.0,8.0,7.0,6,0.7\n";
    out << "1,0.10,0.1,0.2,0.3,0,0.0\n";
  }
  const auto scans = read_scans_csv(dir.file("s.csv"));
  REQUIRE(scans.size() == 2);
  REQUIRE(scans[0].packets.size() == 2);
  CHECK(scans[0].packets[0].points.size() == 2);
  CHECK(scans[0].packets[1].points.size() == 1);
  CHECK(scans[1].packets[0].points[0].ring == 0);
  CHECK(scans[0].packets[0].points[1].y == doctest::Approx(2.5f));
}

TEST_CASE("labeled point file round trip") {
  TempDir dir;
  std::vector<LabeledPoint> pts(3);
  std::mt19937_64 rng(181);
  std::normal_distribution<double> n(0.0, 5.0);
  for (auto& p : pts) {
    p.mean_xyz = Eigen::Vector3d(n(rng), n(rng), n(rng));
    p.mean_uv = Eigen::Vector2d(n(rng), n(rng));
    p.cov_uv << 2.0, 0.3, 0.3, 1.0;
    p.class_probs.resize(4);
    p.class_probs << 0.1, 0.2, 0.3, 0.4;
  }
  write_labeled_points(dir.file("p.sflp"), pts, 4);
  int classes = 0;
  const auto back = read_labeled_points(dir.file("p.sflp"), &classes);
  CHECK(classes == 4);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].mean_xyz.x() ==
          doctest::Approx(pts[i].mean_xyz.x()).epsilon(1e-6));
    CHECK(back[i].class_probs[3] == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(back[i].cov_uv(0, 1) == doctest::Approx(0.3).epsilon(1e-6));
  }
  write_labeled_points_csv(dir.file("p.csv"), pts, 4);
  CHECK(fs::exists(dir.file("p.csv")));
}

TEST_CASE("calibration file round trip and missing-key rejection") {
  TempDir dir;
  CalibrationSet calib;
  calib.t_veh_ld = pose_to_transform(Pose6{0.5, 0.0, 1.8, 0.0, 0.0, 0.1});
  CameraCalibration cam;
  cam.name = "front";
  cam.intrinsics.fx = 350.0;
  cam.intrinsics.fy = 351.0;
  cam.intrinsics.cx = 255.5;
  cam.intrinsics.cy = 191.5;
  cam.intrinsics.k1 = -0.01;
  cam.intrinsics.width = 512;
  cam.intrinsics.height = 384;
  cam.time_offset = 0.05;
  Eigen::Matrix3d r;
  r << 0, -1, 0, 0, 0, -1, 1, 0, 0;
  cam.t_cam_ld = RigidTransform::from_rotation_translation(r, {0.1, 0.2, 0.3});
  calib.cameras.push_back(cam);

  write_calibration(dir.file("c.txt"), calib);
  const CalibrationSet back = read_calibration(dir.file("c.txt"));
  REQUIRE(back.cameras.size() == 1);
  CHECK(back.cameras[0].name == "front");
  CHECK(back.cameras[0].intrinsics.fy == 351.0);
  CHECK(back.cameras[0].time_offset == 0.05);
  CHECK((back.t_veh_ld.matrix() - calib.t_veh_ld.matrix()).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK((back.cameras[0].t_cam_ld.matrix() - cam.t_cam_ld.matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  // drop a required key
  {
    std::ifstream in(dir.file("c.txt"));
    std::ofstream out(dir.file("bad.txt"));
    std::string line;
    while (std::getline(in, line))
      if (line.rfind("camera0.fy", 0) != 0) out << line << "\n";
  }
  CHECK_THROWS_AS(read_calibration(dir.file("bad.txt")), ConfigError);

  // corrupt the transform
  {
    std::ifstream in(dir.file("c.txt"));
    std::ofstream out(dir.file("bad2.txt"));
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("T_veh_ld", 0) == 0)
        out << "T_veh_ld 2 0 0 0 0 1 0 0 0 0 1 0 0 0 0 1\n";
      else
        out << line << "\n";
    }
  }
  CHECK_THROWS_AS(read_calibration(dir.file("bad2.txt")), ConfigError);
}

}  // TEST_SUITE
