#include "semfuse/labeled_points_io.hpp"

#include <cstring>
#include <fstream>

#include "semfuse/errors.hpp"

namespace semfuse {

void write_labeled_points(const std::string& path,
                          const std::vector<LabeledPoint>& points, int classes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write labeled points: " + path);
  out.write("SFLP", 4);
  const std::uint32_t c = static_cast<std::uint32_t>(classes);
  const std::uint32_t n = static_cast<std::uint32_t>(points.size());
  out.write(reinterpret_cast<const char*>(&c), 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  auto put_f = [&out](double v) {
    const float f = static_cast<float>(v);
    out.write(reinterpret_cast<const char*>(&f), 4);
  };
  for (const auto& p : points) {
    if (p.class_probs.size() != classes)
      throw DataError("labeled point class count mismatch writing " + path);
    put_f(p.mean_xyz.x());
    put_f(p.mean_xyz.y());
    put_f(p.mean_xyz.z());
    for (int i = 0; i < classes; ++i) put_f(p.class_probs[i]);
    put_f(p.mean_uv.x());
    put_f(p.mean_uv.y());
    put_f(p.cov_uv(0, 0));
    put_f(p.cov_uv(0, 1));
    put_f(p.cov_uv(1, 1));
  }
}

std::vector<LabeledPoint> read_labeled_points(const std::string& path,
                                              int* classes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open labeled points: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "SFLP", 4) != 0)
    throw DataError("not a labeled point file (bad magic): " + path);
  std::uint32_t c, n;
  if (!in.read(reinterpret_cast<char*>(&c), 4) ||
      !in.read(reinterpret_cast<char*>(&n), 4))
    throw DataError("truncated labeled point file: " + path);
  auto get_f = [&in, &path]() {
    float f;
    if (!in.read(reinterpret_cast<char*>(&f), 4))
      throw DataError("truncated labeled point file: " + path);
    return static_cast<double>(f);
  };
  std::vector<LabeledPoint> points(n);
  for (auto& p : points) {
    const double x = get_f();
    const double y = get_f();
    const double z = get_f();
    p.mean_xyz = Eigen::Vector3d(x, y, z);
    p.class_probs.resize(c);
    for (std::uint32_t i = 0; i < c; ++i) p.class_probs[i] = get_f();
    const double u = get_f();
    const double v = get_f();
    p.mean_uv = Eigen::Vector2d(u, v);
    const double uu = get_f();
    const double uv = get_f();
    const double vv = get_f();
    p.cov_uv << uu, uv, uv, vv;
  }
  if (classes) *classes = static_cast<int>(c);
  return points;
}

void write_labeled_points_csv(const std::string& path,
                              const std::vector<LabeledPoint>& points,
                              int classes) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write labeled point csv: " + path);
  out << "x,y,z,u,v,cov_uu,cov_uv,cov_vv";
  for (int i = 0; i < classes; ++i) out << ",p" << i;
  out << "\n";
  out.precision(9);
  for (const auto& p : points) {
    out << p.mean_xyz.x() << ',' << p.mean_xyz.y() << ',' << p.mean_xyz.z()
        << ',' << p.mean_uv.x() << ',' << p.mean_uv.y() << ','
        << p.cov_uv(0, 0) << ',' << p.cov_uv(0, 1) << ',' << p.cov_uv(1, 1);
    for (int i = 0; i < classes; ++i) out << ',' << p.class_probs[i];
    out << "\n";
  }
}

}  // namespace semfuse
