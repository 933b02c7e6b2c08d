#include "semfuse/lidar_scan.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "semfuse/errors.hpp"

namespace semfuse {

namespace {

constexpr char kMagic[4] = {'S', 'F', 'L', 'S'};

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw DataError("truncated scan file: " + path);
  return v;
}

}  // namespace

std::size_t LidarScan::point_count() const {
  std::size_t n = 0;
  for (const auto& pk : packets) n += pk.points.size();
  return n;
}

std::vector<double> LidarScan::packet_times() const {
  std::vector<double> t;
  t.reserve(packets.size());
  for (const auto& pk : packets) t.push_back(pk.t);
  return t;
}

void write_scans(const std::string& path, const std::vector<LidarScan>& scans) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write scan file: " + path);
  out.write(kMagic, 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(scans.size()));
  for (const auto& scan : scans) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(scan.packets.size()));
    for (const auto& pk : scan.packets) {
      put<double>(out, pk.t);
      put<std::uint32_t>(out, static_cast<std::uint32_t>(pk.points.size()));
      for (const auto& p : pk.points) {
        put<float>(out, p.x);
        put<float>(out, p.y);
        put<float>(out, p.z);
        put<std::uint8_t>(out, p.ring);
        put<float>(out, p.azimuth);
      }
    }
  }
}

std::vector<LidarScan> read_scans(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open scan file: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("not a scan file (bad magic): " + path);
  const auto n_scans = get<std::uint32_t>(in, path);
  std::vector<LidarScan> scans(n_scans);
  for (auto& scan : scans) {
    const auto n_packets = get<std::uint32_t>(in, path);
    scan.packets.resize(n_packets);
    double prev_t = -std::numeric_limits<double>::infinity();
    for (auto& pk : scan.packets) {
      pk.t = get<double>(in, path);
      if (!(pk.t > prev_t))
        throw DataError("packet timestamps not strictly ascending: " + path);
      prev_t = pk.t;
      const auto m = get<std::uint32_t>(in, path);
      pk.points.resize(m);
      for (auto& p : pk.points) {
        p.x = get<float>(in, path);
        p.y = get<float>(in, path);
        p.z = get<float>(in, path);
        p.ring = get<std::uint8_t>(in, path);
        p.azimuth = get<float>(in, path);
      }
    }
  }
  return scans;
}

std::vector<LidarScan> read_scans_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scan csv: " + path);
  std::vector<LidarScan> scans;
  std::string line;
  bool first = true;
  long current_scan = -1;
  double current_t = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.rfind("scan,", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    std::istringstream ss(line);
    long scan_id;
    double t, x, y, z, azimuth;
    int ring;
    char comma;
    if (!(ss >> scan_id >> comma >> t >> comma >> x >> comma >> y >> comma >>
          z >> comma >> ring >> comma >> azimuth))
      throw DataError("malformed scan csv row in " + path + ": " + line);
    if (scan_id != current_scan) {
      if (scan_id != static_cast<long>(scans.size()))
        throw DataError("scan ids must be dense and ascending: " + path);
      scans.emplace_back();
      current_scan = scan_id;
      current_t = -std::numeric_limits<double>::infinity();
    }
    auto& scan = scans.back();
    if (scan.packets.empty() || t != current_t) {
      if (t <= current_t)
        throw DataError("packet timestamps not strictly ascending: " + path);
      scan.packets.push_back(LidarPacket{t, {}});
      current_t = t;
    }
    scan.packets.back().points.push_back(
        LidarPoint{static_cast<float>(x), static_cast<float>(y),
                   static_cast<float>(z), static_cast<std::uint8_t>(ring),
                   static_cast<float>(azimuth)});
  }
  return scans;
}

}  // namespace semfuse
