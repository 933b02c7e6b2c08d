#include "semfuse/kernels.hpp"

#include <cmath>
#include <limits>

namespace semfuse::kernels {
namespace {

void tempered_softmax_block_scalar(const float* scores, std::size_t plane_stride,
                                   int classes, std::size_t n,
                                   const double* inv_tau, double* probs,
                                   std::size_t out_stride) {
  for (std::size_t i = 0; i < n; ++i) {
    float smax = scores[i];
    for (int c = 1; c < classes; ++c) {
      const float s = scores[c * plane_stride + i];
      if (s > smax) smax = s;
    }
    const double it = inv_tau[i];
    double sum = 0.0;
    for (int c = 0; c < classes; ++c) {
      const double e =
          std::exp((static_cast<double>(scores[c * plane_stride + i]) -
                    static_cast<double>(smax)) *
                   it);
      probs[c * out_stride + i] = e;
      sum += e;
    }
    const double inv = 1.0 / sum;
    for (int c = 0; c < classes; ++c) probs[c * out_stride + i] *= inv;
  }
}

void transform_points_scalar(const double m[12], const double* xs,
                             const double* ys, const double* zs, std::size_t n,
                             double* ox, double* oy, double* oz) {
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i], y = ys[i], z = zs[i];
    ox[i] = std::fma(m[0], x, std::fma(m[1], y, std::fma(m[2], z, m[3])));
    oy[i] = std::fma(m[4], x, std::fma(m[5], y, std::fma(m[6], z, m[7])));
    oz[i] = std::fma(m[8], x, std::fma(m[9], y, std::fma(m[10], z, m[11])));
  }
}

void exp_quadratic_row_scalar(double qa, double qb, double qc, double d0,
                              std::size_t n, double* w) {
  for (std::size_t i = 0; i < n; ++i) {
    const double d = d0 + static_cast<double>(i);
    w[i] = std::exp((qa * d + qb) * d + qc);
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const Dispatch& scalar() {
  static const Dispatch table{
      "scalar",
      &tempered_softmax_block_scalar,
      &transform_points_scalar,
      &exp_quadratic_row_scalar,
      &dot_scalar,
  };
  return table;
}

}  // namespace semfuse::kernels
