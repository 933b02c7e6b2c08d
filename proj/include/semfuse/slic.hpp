#ifndef SEMFUSE_SLIC_HPP
#define SEMFUSE_SLIC_HPP

#include "semfuse/image.hpp"
#include "semfuse/semantic_probability.hpp"

namespace semfuse {

/// SLIC superpixel segmentation in CIELAB + xy space.
/// Grid-seeded cluster centers, `iterations` rounds of assignment within
/// 2S x 2S windows using d = sqrt(d_lab^2 + (compactness/S)^2 d_xy^2), then
/// connectivity enforcement (orphan components merged into the largest
/// adjacent region) and dense relabeling. Deterministic for fixed inputs.
/// Throws InvalidKError when k_target exceeds the pixel count.
SuperpixelMap slic_segment(const ImageU8& image, int k_target,
                           double compactness = 10.0, int iterations = 10);

/// sRGB (8-bit, D65) to CIELAB. Exposed for the tests' reference math.
void rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b, float& L,
                float& a, float& bb);

}  // namespace semfuse

#endif
