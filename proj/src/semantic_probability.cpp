#include "semfuse/semantic_probability.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "semfuse/errors.hpp"
#include "semfuse/kernels.hpp"

namespace semfuse {

LabelImage argmax_labels(const ScoreMap& s) {
  LabelImage l;
  l.height = s.height;
  l.width = s.width;
  l.labels.resize(s.plane());
  const std::size_t plane = s.plane();
  for (std::size_t i = 0; i < plane; ++i) {
    float best = s.scores[i];
    std::uint32_t best_c = 0;
    for (int c = 1; c < s.classes; ++c) {
      const float v = s.scores[c * plane + i];
      if (v > best) {
        best = v;
        best_c = static_cast<std::uint32_t>(c);
      }
    }
    l.labels[i] = best_c;
  }
  return l;
}

SuperpixelStats predominant_fraction(const SuperpixelMap& sp,
                                     const LabelImage& l) {
  if (sp.height != l.height || sp.width != l.width)
    throw std::invalid_argument("predominant_fraction: shape mismatch");
  std::uint32_t classes = 0;
  for (std::uint32_t id : l.labels) classes = std::max(classes, id + 1);

  // counts[k * classes + c]
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(sp.count) * classes, 0);
  std::vector<std::uint32_t> totals(sp.count, 0);
  const std::size_t n = sp.ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t k = sp.ids[i];
    ++counts[static_cast<std::size_t>(k) * classes + l.labels[i]];
    ++totals[k];
  }

  SuperpixelStats stats;
  stats.spp.resize(sp.count);
  stats.tau.resize(sp.count);
  for (std::uint32_t k = 0; k < sp.count; ++k) {
    std::uint32_t mode = 0;
    for (std::uint32_t c = 0; c < classes; ++c)
      mode = std::max(mode, counts[static_cast<std::size_t>(k) * classes + c]);
    const double spp =
        totals[k] > 0 ? static_cast<double>(mode) / totals[k] : 1.0;
    stats.spp[k] = spp;
    stats.tau[k] = std::max(1.0, 1.0 / (spp * spp));
  }
  return stats;
}

ClassProbabilityImage tempered_softmax(const ScoreMap& s, const SuperpixelMap& sp,
                                       const SuperpixelStats& stats) {
  if (sp.height != s.height || sp.width != s.width)
    throw std::invalid_argument("tempered_softmax: shape mismatch");
  if (stats.tau.size() < sp.count)
    throw std::invalid_argument("tempered_softmax: stats for fewer superpixels than map");

  ClassProbabilityImage out;
  out.classes = s.classes;
  out.height = s.height;
  out.width = s.width;
  out.probs.resize(static_cast<std::size_t>(s.classes) * s.plane());

  const std::size_t plane = s.plane();
  std::vector<double> inv_tau(static_cast<std::size_t>(s.width));
  const auto& k = kernels::active();
  for (int y = 0; y < s.height; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * s.width;
    for (int x = 0; x < s.width; ++x)
      inv_tau[x] = 1.0 / stats.tau[sp.ids[row + x]];
    k.tempered_softmax_block(s.scores.data() + row, plane, s.classes,
                             static_cast<std::size_t>(s.width), inv_tau.data(),
                             out.probs.data() + row, plane);
  }
  return out;
}

ClassProbabilityImage softmax(const ScoreMap& s) {
  SuperpixelMap sp;
  sp.height = s.height;
  sp.width = s.width;
  sp.count = 1;
  sp.ids.assign(s.plane(), 0);
  SuperpixelStats stats;
  stats.spp = {1.0};
  stats.tau = {1.0};
  return tempered_softmax(s, sp, stats);
}

namespace {

void write_header(std::ofstream& out, const char magic[4], std::uint32_t a,
                  std::uint32_t n, std::uint32_t m) {
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&a), 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&m), 4);
}

void read_header(std::ifstream& in, const char magic[4], std::uint32_t& a,
                 std::uint32_t& n, std::uint32_t& m, const std::string& path) {
  char got[4];
  if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0)
    throw DataError("bad magic in " + path);
  if (!in.read(reinterpret_cast<char*>(&a), 4) ||
      !in.read(reinterpret_cast<char*>(&n), 4) ||
      !in.read(reinterpret_cast<char*>(&m), 4))
    throw DataError("truncated header in " + path);
}

}  // namespace

void write_score_map(const std::string& path, const ScoreMap& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write score map: " + path);
  write_header(out, "SFSM", s.classes, s.height, s.width);
  out.write(reinterpret_cast<const char*>(s.scores.data()),
            static_cast<std::streamsize>(s.scores.size() * sizeof(float)));
}

ScoreMap read_score_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open score map: " + path);
  std::uint32_t c, n, m;
  read_header(in, "SFSM", c, n, m, path);
  if (c < 2) throw DataError("score map needs >= 2 classes: " + path);
  ScoreMap s;
  s.classes = static_cast<int>(c);
  s.height = static_cast<int>(n);
  s.width = static_cast<int>(m);
  s.scores.resize(static_cast<std::size_t>(c) * n * m);
  if (!in.read(reinterpret_cast<char*>(s.scores.data()),
               static_cast<std::streamsize>(s.scores.size() * sizeof(float))))
    throw DataError("truncated score map: " + path);
  for (float v : s.scores)
    if (!std::isfinite(v)) throw DataError("non-finite score in " + path);
  return s;
}

void write_label_image(const std::string& path, const LabelImage& l,
                       std::uint32_t classes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write label image: " + path);
  write_header(out, "SFLI", classes, l.height, l.width);
  out.write(reinterpret_cast<const char*>(l.labels.data()),
            static_cast<std::streamsize>(l.labels.size() * 4));
}

LabelImage read_label_image(const std::string& path, std::uint32_t* classes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open label image: " + path);
  std::uint32_t c, n, m;
  read_header(in, "SFLI", c, n, m, path);
  LabelImage l;
  l.height = static_cast<int>(n);
  l.width = static_cast<int>(m);
  l.labels.resize(static_cast<std::size_t>(n) * m);
  if (!in.read(reinterpret_cast<char*>(l.labels.data()),
               static_cast<std::streamsize>(l.labels.size() * 4)))
    throw DataError("truncated label image: " + path);
  if (c > 0)
    for (std::uint32_t id : l.labels)
      if (id >= c) throw DataError("label id out of range in " + path);
  if (classes) *classes = c;
  return l;
}

void write_superpixel_map(const std::string& path, const SuperpixelMap& sp) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write superpixel map: " + path);
  write_header(out, "SFSP", sp.count, sp.height, sp.width);
  out.write(reinterpret_cast<const char*>(sp.ids.data()),
            static_cast<std::streamsize>(sp.ids.size() * 4));
}

SuperpixelMap read_superpixel_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open superpixel map: " + path);
  std::uint32_t c, n, m;
  read_header(in, "SFSP", c, n, m, path);
  SuperpixelMap sp;
  sp.count = c;
  sp.height = static_cast<int>(n);
  sp.width = static_cast<int>(m);
  sp.ids.resize(static_cast<std::size_t>(n) * m);
  if (!in.read(reinterpret_cast<char*>(sp.ids.data()),
               static_cast<std::streamsize>(sp.ids.size() * 4)))
    throw DataError("truncated superpixel map: " + path);
  for (std::uint32_t id : sp.ids)
    if (id >= c) throw DataError("superpixel id out of range in " + path);
  return sp;
}

}  // namespace semfuse
