#include "semfuse/image.hpp"

#include <fstream>

#include "semfuse/errors.hpp"

namespace semfuse {

namespace {

void skip_ws_comments(std::istream& in) {
  int c = in.peek();
  while (c == '#' || c == ' ' || c == '\n' || c == '\r' || c == '\t') {
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      in.get();
    }
    c = in.peek();
  }
}

}  // namespace

void write_ppm(const std::string& path, const ImageU8& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write ppm: " + path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()),
            static_cast<std::streamsize>(img.rgb.size()));
}

ImageU8 read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open ppm: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw DataError("not a P6 ppm: " + path);
  skip_ws_comments(in);
  int w, h, maxval;
  in >> w;
  skip_ws_comments(in);
  in >> h;
  skip_ws_comments(in);
  in >> maxval;
  if (!in || maxval != 255 || w < 0 || h < 0)
    throw DataError("unsupported ppm header: " + path);
  in.get();  // single whitespace after maxval
  ImageU8 img;
  img.width = w;
  img.height = h;
  img.rgb.resize(static_cast<std::size_t>(3) * w * h);
  if (!img.rgb.empty() &&
      !in.read(reinterpret_cast<char*>(img.rgb.data()),
               static_cast<std::streamsize>(img.rgb.size())))
    throw DataError("truncated ppm: " + path);
  return img;
}

void write_pgm16(const std::string& path, int height, int width,
                 const std::vector<std::uint16_t>& gray) {
  if (gray.size() != static_cast<std::size_t>(height) * width)
    throw DataError("pgm16 size mismatch: " + path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write pgm: " + path);
  out << "P5\n" << width << " " << height << "\n65535\n";
  for (std::uint16_t v : gray) {  // big-endian per the format
    const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
    out.write(bytes, 2);
  }
}

std::vector<std::uint16_t> read_pgm16(const std::string& path, int& height,
                                      int& width) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open pgm: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw DataError("not a P5 pgm: " + path);
  skip_ws_comments(in);
  int maxval;
  in >> width;
  skip_ws_comments(in);
  in >> height;
  skip_ws_comments(in);
  in >> maxval;
  if (!in || maxval != 65535 || width < 0 || height < 0)
    throw DataError("unsupported pgm header (want maxval 65535): " + path);
  in.get();
  std::vector<std::uint16_t> gray(static_cast<std::size_t>(height) * width);
  for (auto& v : gray) {
    char bytes[2];
    if (!in.read(bytes, 2)) throw DataError("truncated pgm: " + path);
    v = static_cast<std::uint16_t>((static_cast<unsigned char>(bytes[0]) << 8) |
                                   static_cast<unsigned char>(bytes[1]));
  }
  return gray;
}

void write_pgm8(const std::string& path, int height, int width,
                const std::vector<std::uint8_t>& gray) {
  if (gray.size() != static_cast<std::size_t>(height) * width)
    throw DataError("pgm8 size mismatch: " + path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write pgm: " + path);
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(gray.data()),
            static_cast<std::streamsize>(gray.size()));
}

}  // namespace semfuse
