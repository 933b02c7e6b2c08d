#ifndef SEMFUSE_IMAGE_HPP
#define SEMFUSE_IMAGE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace semfuse {

/// Interleaved 8-bit RGB image.
struct ImageU8 {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> rgb;  // 3 * height * width

  std::uint8_t* px(int y, int x) { return rgb.data() + 3 * (y * width + x); }
  const std::uint8_t* px(int y, int x) const {
    return rgb.data() + 3 * (y * width + x);
  }
};

void write_ppm(const std::string& path, const ImageU8& img);
ImageU8 read_ppm(const std::string& path);

/// 16-bit grayscale (P5 maxval 65535); used for lossless label/superpixel-id
/// round trips.
void write_pgm16(const std::string& path, int height, int width,
                 const std::vector<std::uint16_t>& gray);
std::vector<std::uint16_t> read_pgm16(const std::string& path, int& height,
                                      int& width);

/// 8-bit grayscale (P5 maxval 255) for heat layers.
void write_pgm8(const std::string& path, int height, int width,
                const std::vector<std::uint8_t>& gray);

}  // namespace semfuse

#endif
