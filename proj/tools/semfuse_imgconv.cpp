// Lossless conversion between the binary label/superpixel formats and 16-bit
// PGM, plus score-map plane export to 8-bit PGM for inspection.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "semfuse/errors.hpp"
#include "semfuse/image.hpp"
#include "semfuse/semantic_probability.hpp"

using namespace semfuse;

int main(int argc, char** argv) {
  CLI::App app{"image format conversion for label/superpixel/score files"};
  app.require_subcommand(1);

  std::string in, out;
  int plane = 0;

  auto* l2p = app.add_subcommand("labels-to-pgm", "label image -> 16-bit PGM (lossless)");
  l2p->add_option("--in", in)->required();
  l2p->add_option("--out", out)->required();

  auto* p2l = app.add_subcommand("pgm-to-labels", "16-bit PGM -> label image");
  p2l->add_option("--in", in)->required();
  p2l->add_option("--out", out)->required();

  auto* s2p = app.add_subcommand("superpixels-to-pgm", "superpixel map -> 16-bit PGM (lossless)");
  s2p->add_option("--in", in)->required();
  s2p->add_option("--out", out)->required();

  auto* p2s = app.add_subcommand("pgm-to-superpixels", "16-bit PGM -> superpixel map");
  p2s->add_option("--in", in)->required();
  p2s->add_option("--out", out)->required();

  auto* sm = app.add_subcommand("scoremap-plane", "one score plane -> 8-bit PGM (scaled)");
  sm->add_option("--in", in)->required();
  sm->add_option("--plane", plane, "class plane index")->required();
  sm->add_option("--out", out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (l2p->parsed()) {
      const LabelImage l = read_label_image(in);
      std::vector<std::uint16_t> gray(l.labels.size());
      for (std::size_t i = 0; i < gray.size(); ++i)
        gray[i] = static_cast<std::uint16_t>(l.labels[i]);
      write_pgm16(out, l.height, l.width, gray);
    } else if (p2l->parsed()) {
      int h, w;
      const auto gray = read_pgm16(in, h, w);
      LabelImage l;
      l.height = h;
      l.width = w;
      l.labels.assign(gray.begin(), gray.end());
      std::uint32_t classes = 0;
      for (auto id : l.labels) classes = std::max(classes, id + 1);
      write_label_image(out, l, classes);
    } else if (s2p->parsed()) {
      const SuperpixelMap sp = read_superpixel_map(in);
      std::vector<std::uint16_t> gray(sp.ids.size());
      for (std::size_t i = 0; i < gray.size(); ++i)
        gray[i] = static_cast<std::uint16_t>(sp.ids[i]);
      write_pgm16(out, sp.height, sp.width, gray);
    } else if (p2s->parsed()) {
      int h, w;
      const auto gray = read_pgm16(in, h, w);
      SuperpixelMap sp;
      sp.height = h;
      sp.width = w;
      sp.ids.assign(gray.begin(), gray.end());
      for (auto id : sp.ids) sp.count = std::max(sp.count, id + 1);
      write_superpixel_map(out, sp);
    } else if (sm->parsed()) {
      const ScoreMap s = read_score_map(in);
      if (plane < 0 || plane >= s.classes) throw DataError("plane out of range");
      float lo = s.scores[0], hi = s.scores[0];
      for (float v : s.scores) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const float span = hi > lo ? hi - lo : 1.0f;
      std::vector<std::uint8_t> gray(s.plane());
      for (std::size_t i = 0; i < gray.size(); ++i)
        gray[i] = static_cast<std::uint8_t>(
            255.0f * (s.scores[plane * s.plane() + i] - lo) / span);
      write_pgm8(out, s.height, s.width, gray);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
