#ifndef SEMFUSE_SEMANTIC_PROBABILITY_HPP
#define SEMFUSE_SEMANTIC_PROBABILITY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace semfuse {

/// Unnormalized class activations, class-major planes (c x n x m), row-major
/// within a plane.
struct ScoreMap {
  int classes = 0;
  int height = 0;
  int width = 0;
  std::vector<float> scores;

  std::size_t plane() const {
    return static_cast<std::size_t>(height) * width;
  }
  float at(int c, int y, int x) const {
    return scores[c * plane() + static_cast<std::size_t>(y) * width + x];
  }
  float& at(int c, int y, int x) {
    return scores[c * plane() + static_cast<std::size_t>(y) * width + x];
  }
};

struct LabelImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> labels;

  std::uint32_t at(int y, int x) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
};

struct SuperpixelMap {
  int height = 0;
  int width = 0;
  std::uint32_t count = 0;
  std::vector<std::uint32_t> ids;  // dense in [0, count)

  std::uint32_t at(int y, int x) const {
    return ids[static_cast<std::size_t>(y) * width + x];
  }
};

/// Per-superpixel predominant-label fraction and softmax temperature
/// tau_k = 1 / spp_k^2 (clamped below at 1).
struct SuperpixelStats {
  std::vector<double> spp;
  std::vector<double> tau;
};

/// Per-pixel class distribution, same plane layout as ScoreMap but double
/// precision (each pixel sums to 1 within 1e-9).
struct ClassProbabilityImage {
  int classes = 0;
  int height = 0;
  int width = 0;
  std::vector<double> probs;

  std::size_t plane() const {
    return static_cast<std::size_t>(height) * width;
  }
  double at(int c, int y, int x) const {
    return probs[c * plane() + static_cast<std::size_t>(y) * width + x];
  }
};

/// Per-pixel argmax of the score planes; ties pick the lowest class id.
LabelImage argmax_labels(const ScoreMap& s);

/// spp_k = (modal label count)/(pixel count) per superpixel, tau_k = 1/spp_k^2.
SuperpixelStats predominant_fraction(const SuperpixelMap& sp, const LabelImage& l);

/// Per superpixel k, pixel-wise softmax with temperature tau_k, computed with
/// max subtraction. The per-pixel argmax equals the raw-score argmax.
ClassProbabilityImage tempered_softmax(const ScoreMap& s, const SuperpixelMap& sp,
                                       const SuperpixelStats& stats);

/// Plain softmax (temperature 1 everywhere); same code path as
/// tempered_softmax with a single spp = 1 superpixel.
ClassProbabilityImage softmax(const ScoreMap& s);

// --- binary file formats (little-endian) ---
// ScoreMap:       "SFSM", u32 c, u32 n, u32 m, c*n*m f32
// LabelImage:     "SFLI", u32 c (class count, informational), u32 n, u32 m, n*m u32
// SuperpixelMap:  "SFSP", u32 count, u32 n, u32 m, n*m u32

void write_score_map(const std::string& path, const ScoreMap& s);
ScoreMap read_score_map(const std::string& path);

void write_label_image(const std::string& path, const LabelImage& l,
                       std::uint32_t classes);
LabelImage read_label_image(const std::string& path, std::uint32_t* classes = nullptr);

void write_superpixel_map(const std::string& path, const SuperpixelMap& sp);
SuperpixelMap read_superpixel_map(const std::string& path);

}  // namespace semfuse

#endif
