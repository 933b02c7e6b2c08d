#ifndef SEMFUSE_LIDAR_SCAN_HPP
#define SEMFUSE_LIDAR_SCAN_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace semfuse {

struct LidarPoint {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;
  std::uint8_t ring = 0;
  float azimuth = 0.0f;  // rad
};

/// Measurements sharing one timestamp.
struct LidarPacket {
  double t = 0.0;
  std::vector<LidarPoint> points;
};

/// One revolution: packets with strictly ascending timestamps.
struct LidarScan {
  std::vector<LidarPacket> packets;

  std::size_t point_count() const;
  std::vector<double> packet_times() const;
};

/// Binary scan files: magic "SFLS", u32 scan count; per scan: u32 packet
/// count; per packet: f64 t, u32 M, then M x {f32 x,y,z, u8 ring, f32
/// azimuth}. Little-endian throughout.
void write_scans(const std::string& path, const std::vector<LidarScan>& scans);
std::vector<LidarScan> read_scans(const std::string& path);

/// CSV fixture import: columns scan,packet_t,x,y,z,ring,azimuth; rows grouped
/// by scan id, packets formed from consecutive rows sharing packet_t.
std::vector<LidarScan> read_scans_csv(const std::string& path);

}  // namespace semfuse

#endif
