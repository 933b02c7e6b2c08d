#include "semfuse/occlusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semfuse/kernels.hpp"

namespace semfuse {

GapSpec compute_gaps(const FisheyeIntrinsics& k, double theta_h,
                     double theta_v) {
  if (!(theta_h > 0.0) || !(theta_v > 0.0) || !(k.fx > 0.0) || !(k.fy > 0.0))
    throw std::invalid_argument("compute_gaps: positive angles and focals required");
  GapSpec g;
  g.u_gap = std::max(1, static_cast<int>(std::lround(k.fx * std::tan(theta_h))));
  g.v_gap = std::max(1, static_cast<int>(std::lround(k.fy * std::tan(theta_v))));
  return g;
}

std::vector<std::size_t> sort_by_range(
    std::span<const ProjectedPointGaussian> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].range < points[b].range;
  });
  return order;
}

std::vector<std::uint8_t> occlusion_filter(
    std::span<const ProjectedPointGaussian> points,
    std::span<const std::size_t> order, const GapSpec& gaps, int width,
    int height) {
  std::vector<std::uint8_t> visible(points.size(), 0);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(width) * height, 0);
  const int hu = (gaps.u_gap + 1) / 2;  // ceil(u_gap / 2)
  const int hv = (gaps.v_gap + 1) / 2;

  for (std::size_t idx : order) {
    const auto& p = points[idx];
    const long lu = std::lround(p.mean_uv.x());
    const long lv = std::lround(p.mean_uv.y());
    if (lu < 0 || lu >= width || lv < 0 || lv >= height) continue;
    const int u = static_cast<int>(lu);
    const int v = static_cast<int>(lv);
    if (mask[static_cast<std::size_t>(v) * width + u]) continue;  // occluded
    visible[idx] = 1;
    const int x0 = std::max(0, u - hu), x1 = std::min(width - 1, u + hu);
    const int y0 = std::max(0, v - hv), y1 = std::min(height - 1, v + hv);
    for (int y = y0; y <= y1; ++y)
      std::fill(mask.begin() + static_cast<std::size_t>(y) * width + x0,
                mask.begin() + static_cast<std::size_t>(y) * width + x1 + 1,
                std::uint8_t{1});
  }
  return visible;
}

double bivariate_pdf(double u, double v, double mu_u, double mu_v,
                     double sigma_u, double sigma_v, double rho) {
  const double du = u - mu_u;
  const double dv = v - mu_v;
  const double one_m_r2 = 1.0 - rho * rho;
  const double pd = (du * du) / (sigma_u * sigma_u) +
                    (dv * dv) / (sigma_v * sigma_v) -
                    2.0 * rho * du * dv / (sigma_u * sigma_v);
  return std::exp(-0.5 * pd / one_m_r2) /
         (2.0 * M_PI * sigma_u * sigma_v * std::sqrt(one_m_r2));
}

namespace {

constexpr double kChi2Q90_2dof = 4.605;  // 90% mass of a 2-DoF chi-square
constexpr double kCollapseSigma = 0.5;   // px
constexpr double kSigmaFloor = 0.25;     // px, guards one-axis degeneracy

bool collapse_lookup(const ProjectedPointGaussian& p,
                     const ClassProbabilityImage& probs, LabeledPoint& out) {
  const long lu = std::lround(p.mean_uv.x());
  const long lv = std::lround(p.mean_uv.y());
  if (lu < 0 || lu >= probs.width || lv < 0 || lv >= probs.height) return false;
  out.class_probs.resize(probs.classes);
  for (int c = 0; c < probs.classes; ++c)
    out.class_probs[c] = probs.at(c, static_cast<int>(lv), static_cast<int>(lu));
  return true;
}

}  // namespace

std::vector<LabeledPoint> transfer_labels(
    std::span<const ProjectedPointGaussian> points,
    std::span<const std::uint8_t> visible, const ClassProbabilityImage& probs,
    TransferDiagnostics* diag) {
  if (visible.size() != points.size())
    throw std::invalid_argument("transfer_labels: flag count mismatch");
  std::vector<LabeledPoint> out;
  out.reserve(points.size());

  const auto& kern = kernels::active();
  std::vector<double> wrow;
  std::vector<double> acc;

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!visible[i]) continue;
    const auto& p = points[i];

    LabeledPoint lp;
    lp.mean_xyz = p.mean_xyz;
    lp.cov_xyz = p.cov_xyz;
    lp.mean_uv = p.mean_uv;
    lp.cov_uv = p.cov_uv;
    lp.packet = p.packet;
    lp.index = p.index;

    double su = std::sqrt(std::max(0.0, p.cov_uv(0, 0)));
    double sv = std::sqrt(std::max(0.0, p.cov_uv(1, 1)));

    if (su < kCollapseSigma && sv < kCollapseSigma) {
      if (!collapse_lookup(p, probs, lp)) {
        if (diag) ++diag->empty_window;
        continue;
      }
      out.push_back(std::move(lp));
      continue;
    }

    su = std::max(su, kSigmaFloor);
    sv = std::max(sv, kSigmaFloor);
    double rho = p.cov_uv(0, 1) / (su * sv);
    rho = std::clamp(rho, -0.999, 0.999);

    const double mu_u = p.mean_uv.x();
    const double mu_v = p.mean_uv.y();
    const double up = std::ceil(std::sqrt(kChi2Q90_2dof) * su);
    const double vp = std::ceil(std::sqrt(kChi2Q90_2dof) * sv);

    const int u0 = std::max(0, static_cast<int>(std::ceil(mu_u - up)));
    const int u1 = std::min(probs.width - 1, static_cast<int>(std::floor(mu_u + up)));
    const int v0 = std::max(0, static_cast<int>(std::ceil(mu_v - vp)));
    const int v1 = std::min(probs.height - 1, static_cast<int>(std::floor(mu_v + vp)));
    if (u0 > u1 || v0 > v1) {
      if (diag) ++diag->empty_window;
      continue;
    }

    const int nw = u1 - u0 + 1;
    wrow.resize(nw);
    acc.assign(probs.classes, 0.0);
    double total = 0.0;

    // Row-wise: w(u) = exp(qa du^2 + qb du + qc(dv)); the density's constant
    // factor cancels in the normalization.
    const double inv = 1.0 / (1.0 - rho * rho);
    const double qa = -0.5 * inv / (su * su);
    const double qcv = -0.5 * inv / (sv * sv);
    for (int v = v0; v <= v1; ++v) {
      const double dv = v - mu_v;
      const double qb = rho * dv * inv / (su * sv);
      const double qc = qcv * dv * dv;
      kern.exp_quadratic_row(qa, qb, qc, u0 - mu_u, nw, wrow.data());
      const std::size_t row_off = static_cast<std::size_t>(v) * probs.width + u0;
      for (int c = 0; c < probs.classes; ++c)
        acc[c] += kern.dot(wrow.data(), probs.probs.data() + c * probs.plane() + row_off, nw);
    }
    for (double a : acc) total += a;
    if (!(total > 0.0)) {
      if (diag) ++diag->empty_window;
      continue;
    }

    lp.class_probs.resize(probs.classes);
    for (int c = 0; c < probs.classes; ++c) lp.class_probs[c] = acc[c] / total;
    out.push_back(std::move(lp));
  }
  return out;
}

}  // namespace semfuse
