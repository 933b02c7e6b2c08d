#include "semfuse/kernels.hpp"

#if defined(SEMFUSE_HAVE_X86_INTRIN) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace semfuse::kernels {
namespace {

// exp on 4 doubles, Cephes-style: range reduction to |r| <= 0.5 ln2, rational
// approximation exp(r) = 1 + 2 r P(r^2) / (Q(r^2) - r P(r^2)), scale by 2^n.
// Accuracy ~1-2 ulp over the clamped range.
inline __m256d exp_pd(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);

  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

  const __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(n, c1, x);
  x = _mm256_fnmadd_pd(n, c2, x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d px = _mm256_fmadd_pd(p0, xx, p1);
  px = _mm256_fmadd_pd(px, xx, p2);
  px = _mm256_mul_pd(px, x);
  __m256d qx = _mm256_fmadd_pd(q0, xx, q1);
  qx = _mm256_fmadd_pd(qx, xx, q2);
  qx = _mm256_fmadd_pd(qx, xx, q3);

  const __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  __m256d res = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  // scale by 2^n: add n to the exponent bits
  const __m128i ni = _mm256_cvtpd_epi32(n);
  const __m256i ni64 = _mm256_cvtepi32_epi64(ni);
  const __m256i pow2 =
      _mm256_slli_epi64(_mm256_add_epi64(ni64, _mm256_set1_epi64x(1023)), 52);
  res = _mm256_mul_pd(res, _mm256_castsi256_pd(pow2));

  return _mm256_andnot_pd(under, res);  // flush below-range inputs to 0
}

void tempered_softmax_block_avx2(const float* scores, std::size_t plane_stride,
                                 int classes, std::size_t n,
                                 const double* inv_tau, double* probs,
                                 std::size_t out_stride) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d smax =
        _mm256_cvtps_pd(_mm_loadu_ps(scores + i));
    for (int c = 1; c < classes; ++c) {
      const __m256d s =
          _mm256_cvtps_pd(_mm_loadu_ps(scores + c * plane_stride + i));
      smax = _mm256_max_pd(smax, s);
    }
    const __m256d it = _mm256_loadu_pd(inv_tau + i);
    __m256d sum = _mm256_setzero_pd();
    for (int c = 0; c < classes; ++c) {
      const __m256d s =
          _mm256_cvtps_pd(_mm_loadu_ps(scores + c * plane_stride + i));
      const __m256d e = exp_pd(_mm256_mul_pd(_mm256_sub_pd(s, smax), it));
      _mm256_storeu_pd(probs + c * out_stride + i, e);
      sum = _mm256_add_pd(sum, e);
    }
    const __m256d inv = _mm256_div_pd(_mm256_set1_pd(1.0), sum);
    for (int c = 0; c < classes; ++c) {
      double* p = probs + c * out_stride + i;
      _mm256_storeu_pd(p, _mm256_mul_pd(_mm256_loadu_pd(p), inv));
    }
  }
  // tail
  for (; i < n; ++i) {
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

void transform_points_avx2(const double m[12], const double* xs,
                           const double* ys, const double* zs, std::size_t n,
                           double* ox, double* oy, double* oz) {
  const __m256d m0 = _mm256_set1_pd(m[0]), m1 = _mm256_set1_pd(m[1]),
                m2 = _mm256_set1_pd(m[2]), m3 = _mm256_set1_pd(m[3]);
  const __m256d m4 = _mm256_set1_pd(m[4]), m5 = _mm256_set1_pd(m[5]),
                m6 = _mm256_set1_pd(m[6]), m7 = _mm256_set1_pd(m[7]);
  const __m256d m8 = _mm256_set1_pd(m[8]), m9 = _mm256_set1_pd(m[9]),
                m10 = _mm256_set1_pd(m[10]), m11 = _mm256_set1_pd(m[11]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs + i);
    const __m256d y = _mm256_loadu_pd(ys + i);
    const __m256d z = _mm256_loadu_pd(zs + i);
    _mm256_storeu_pd(
        ox + i, _mm256_fmadd_pd(m0, x, _mm256_fmadd_pd(m1, y, _mm256_fmadd_pd(m2, z, m3))));
    _mm256_storeu_pd(
        oy + i, _mm256_fmadd_pd(m4, x, _mm256_fmadd_pd(m5, y, _mm256_fmadd_pd(m6, z, m7))));
    _mm256_storeu_pd(
        oz + i, _mm256_fmadd_pd(m8, x, _mm256_fmadd_pd(m9, y, _mm256_fmadd_pd(m10, z, m11))));
  }
  for (; i < n; ++i) {
    const double x = xs[i], y = ys[i], z = zs[i];
    ox[i] = std::fma(m[0], x, std::fma(m[1], y, std::fma(m[2], z, m[3])));
    oy[i] = std::fma(m[4], x, std::fma(m[5], y, std::fma(m[6], z, m[7])));
    oz[i] = std::fma(m[8], x, std::fma(m[9], y, std::fma(m[10], z, m[11])));
  }
}

void exp_quadratic_row_avx2(double qa, double qb, double qc, double d0,
                            std::size_t n, double* w) {
  const __m256d va = _mm256_set1_pd(qa);
  const __m256d vb = _mm256_set1_pd(qb);
  const __m256d vc = _mm256_set1_pd(qc);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_add_pd(
        _mm256_set1_pd(d0 + static_cast<double>(i)),
        _mm256_set_pd(3.0, 2.0, 1.0, 0.0));
    const __m256d q =
        _mm256_mul_pd(_mm256_fmadd_pd(va, d, vb), d);
    _mm256_storeu_pd(w + i, exp_pd(_mm256_add_pd(q, vc)));
  }
  for (; i < n; ++i) {
    const double d = d0 + static_cast<double>(i);
    w[i] = std::exp((qa * d + qb) * d + qc);
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const Dispatch* avx2() {
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma"))
    return nullptr;
  static const Dispatch table{
      "avx2",
      &tempered_softmax_block_avx2,
      &transform_points_avx2,
      &exp_quadratic_row_avx2,
      &dot_avx2,
  };
  return &table;
}

}  // namespace semfuse::kernels

#else

namespace semfuse::kernels {
const Dispatch* avx2() { return nullptr; }
}  // namespace semfuse::kernels

#endif
