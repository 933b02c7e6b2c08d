#ifndef SEMFUSE_KERNELS_HPP
#define SEMFUSE_KERNELS_HPP

#include <cstddef>

namespace semfuse::kernels {

/// Table of the arithmetic inner-loop kernels. One scalar reference
/// implementation and one AVX2+FMA implementation exist; the active table is
/// picked once at startup from CPU capabilities (SEMFUSE_NO_SIMD=1 in the
/// environment forces the scalar path). Variants are equivalence-tested
/// against each other; run-to-run determinism on one machine is unaffected by
/// the dispatch.
struct Dispatch {
  const char* name;

  /// Per-pixel tempered softmax over class planes.
  /// scores: `classes` planes of `n` floats, plane p starting at
  /// scores + p*plane_stride. probs: same plane layout (doubles, out_stride).
  /// For pixel i: probs[c][i] = exp((s[c][i]-max_c)*inv_tau[i]) / sum_c(...).
  void (*tempered_softmax_block)(const float* scores, std::size_t plane_stride,
                                 int classes, std::size_t n,
                                 const double* inv_tau, double* probs,
                                 std::size_t out_stride);

  /// Rigid transform of n points, SoA. m is the row-major 3x4 [R | t].
  /// Both variants evaluate fma(m0,x, fma(m1,y, fma(m2,z, m3))) per component,
  /// so scalar and AVX2 results are bit-identical.
  void (*transform_points)(const double m3x4[12], const double* xs,
                           const double* ys, const double* zs, std::size_t n,
                           double* ox, double* oy, double* oz);

  /// w[i] = exp(qa*d*d + qb*d + qc) with d = d0 + i. Row kernel for the
  /// bivariate-density window sums.
  void (*exp_quadratic_row)(double qa, double qb, double qc, double d0,
                            std::size_t n, double* w);

  /// sum_i a[i]*b[i].
  double (*dot)(const double* a, const double* b, std::size_t n);
};

/// Scalar reference kernels (always available).
const Dispatch& scalar();

/// AVX2+FMA kernels, or nullptr when the CPU (or build) lacks support.
const Dispatch* avx2();

/// The table selected at startup.
const Dispatch& active();

}  // namespace semfuse::kernels

#endif
