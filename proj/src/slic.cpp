#include "semfuse/slic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "semfuse/errors.hpp"

namespace semfuse {

void rgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8, float& L,
                float& a, float& bb) {
  auto inv_gamma = [](double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
  };
  const double r = inv_gamma(r8 / 255.0);
  const double g = inv_gamma(g8 / 255.0);
  const double b = inv_gamma(b8 / 255.0);

  // sRGB -> XYZ (D65)
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

  auto f = [](double t) {
    constexpr double eps = 216.0 / 24389.0;
    constexpr double kap = 24389.0 / 27.0;
    return t > eps ? std::cbrt(t) : (kap * t + 16.0) / 116.0;
  };
  const double fx = f(x / 0.95047);
  const double fy = f(y / 1.0);
  const double fz = f(z / 1.08883);

  L = static_cast<float>(116.0 * fy - 16.0);
  a = static_cast<float>(500.0 * (fx - fy));
  bb = static_cast<float>(200.0 * (fy - fz));
}

namespace {

struct Center {
  float l = 0, a = 0, b = 0, x = 0, y = 0;
};

// Merge orphan connected components into their largest adjacent region and
// relabel densely in raster order of first appearance.
SuperpixelMap enforce_connectivity(int height, int width,
                                   const std::vector<std::uint32_t>& raw) {
  const std::size_t n = static_cast<std::size_t>(height) * width;
  std::vector<std::uint32_t> comp(n, UINT32_MAX);
  std::vector<std::uint32_t> comp_cluster;
  std::vector<std::uint32_t> comp_size;
  std::vector<std::size_t> stack;

  // 4-connected components of the raw assignment
  for (std::size_t start = 0; start < n; ++start) {
    if (comp[start] != UINT32_MAX) continue;
    const std::uint32_t cid = static_cast<std::uint32_t>(comp_cluster.size());
    comp_cluster.push_back(raw[start]);
    comp_size.push_back(0);
    stack.assign(1, start);
    comp[start] = cid;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      ++comp_size[cid];
      const int y = static_cast<int>(i) / width;
      const int x = static_cast<int>(i) % width;
      const int dy[4] = {-1, 1, 0, 0};
      const int dx[4] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        const int ny = y + dy[k], nx = x + dx[k];
        if (ny < 0 || ny >= height || nx < 0 || nx >= width) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * width + nx;
        if (comp[j] == UINT32_MAX && raw[j] == raw[start]) {
          comp[j] = cid;
          stack.push_back(j);
        }
      }
    }
  }

  const std::uint32_t n_comp = static_cast<std::uint32_t>(comp_cluster.size());

  // Keep the largest component per cluster; everything else is an orphan.
  std::vector<std::uint32_t> main_comp;  // per cluster id
  {
    std::uint32_t n_clusters = 0;
    for (std::uint32_t c : raw) n_clusters = std::max(n_clusters, c + 1);
    main_comp.assign(n_clusters, UINT32_MAX);
    for (std::uint32_t c = 0; c < n_comp; ++c) {
      const std::uint32_t cl = comp_cluster[c];
      if (main_comp[cl] == UINT32_MAX || comp_size[c] > comp_size[main_comp[cl]])
        main_comp[cl] = c;
    }
  }

  // Union orphans into the largest 4-adjacent surviving component; repeat so
  // chains of orphans resolve. Deterministic: raster scan, lowest id ties.
  std::vector<std::uint32_t> target(n_comp);
  std::iota(target.begin(), target.end(), 0);
  auto resolve = [&](std::uint32_t c) {
    while (target[c] != c) c = target[c];
    return c;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    // adjacency-size vote per orphan component
    std::vector<std::uint32_t> best_nbr(n_comp, UINT32_MAX);
    std::vector<std::uint32_t> best_size(n_comp, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t ci = resolve(comp[i]);
      if (main_comp[comp_cluster[ci]] == ci) continue;  // not an orphan
      const int y = static_cast<int>(i) / width;
      const int x = static_cast<int>(i) % width;
      const int dy[4] = {-1, 1, 0, 0};
      const int dx[4] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        const int ny = y + dy[k], nx = x + dx[k];
        if (ny < 0 || ny >= height || nx < 0 || nx >= width) continue;
        const std::uint32_t cj =
            resolve(comp[static_cast<std::size_t>(ny) * width + nx]);
        if (cj == ci) continue;
        const std::uint32_t sz = comp_size[cj];
        if (sz > best_size[ci] ||
            (sz == best_size[ci] && cj < best_nbr[ci])) {
          best_size[ci] = sz;
          best_nbr[ci] = cj;
        }
      }
    }
    for (std::uint32_t c = 0; c < n_comp; ++c) {
      if (target[c] != c) continue;
      if (main_comp[comp_cluster[c]] == c) continue;
      if (best_nbr[c] != UINT32_MAX) {
        const std::uint32_t to = resolve(best_nbr[c]);
        if (to != c) {
          target[c] = to;
          comp_size[to] += comp_size[c];
          changed = true;
        }
      }
    }
  }

  // Dense relabel in raster order of first appearance.
  SuperpixelMap sp;
  sp.height = height;
  sp.width = width;
  sp.ids.resize(n);
  std::vector<std::uint32_t> dense(n_comp, UINT32_MAX);
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t c = resolve(comp[i]);
    if (dense[c] == UINT32_MAX) dense[c] = next++;
    sp.ids[i] = dense[c];
  }
  sp.count = next;
  return sp;
}

}  // namespace

SuperpixelMap slic_segment(const ImageU8& image, int k_target,
                           double compactness, int iterations) {
  const int height = image.height, width = image.width;
  const std::size_t n = static_cast<std::size_t>(height) * width;
  if (n == 0) throw std::invalid_argument("slic_segment: empty image");
  if (k_target < 1 || static_cast<std::size_t>(k_target) > n)
    throw InvalidKError("slic_segment: k_target out of range");

  std::vector<float> lab(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    rgb_to_lab(image.rgb[3 * i], image.rgb[3 * i + 1], image.rgb[3 * i + 2],
               lab[3 * i], lab[3 * i + 1], lab[3 * i + 2]);
  }

  const double s_interval = std::sqrt(static_cast<double>(n) / k_target);

  // Grid seeds: nx * ny ~ k_target with cells as square as the aspect allows.
  int nx = static_cast<int>(
      std::lround(std::sqrt(static_cast<double>(k_target) * width / height)));
  nx = std::clamp(nx, 1, k_target);
  int ny = std::max(
      1, static_cast<int>(std::lround(static_cast<double>(k_target) / nx)));
  while (static_cast<long>(nx) * ny > static_cast<long>(n)) {
    if (nx > ny) --nx; else --ny;
  }
  std::vector<Center> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int gy = 0; gy < ny; ++gy) {
    for (int gx = 0; gx < nx; ++gx) {
      const int cx = std::min(width - 1,
                              static_cast<int>((gx + 0.5) * width / nx));
      const int cy = std::min(height - 1,
                              static_cast<int>((gy + 0.5) * height / ny));
      const std::size_t i = static_cast<std::size_t>(cy) * width + cx;
      centers.push_back(Center{lab[3 * i], lab[3 * i + 1], lab[3 * i + 2],
                               static_cast<float>(cx), static_cast<float>(cy)});
    }
  }

  const float spatial_w =
      static_cast<float>((compactness / s_interval) * (compactness / s_interval));
  const int window = std::max(1, static_cast<int>(std::lround(s_interval)));

  std::vector<std::uint32_t> assign(n, 0);
  std::vector<float> best(n);

  for (int it = 0; it < iterations; ++it) {
    std::fill(best.begin(), best.end(), std::numeric_limits<float>::max());
    for (std::uint32_t c = 0; c < centers.size(); ++c) {
      const Center& ct = centers[c];
      const int x0 = std::max(0, static_cast<int>(ct.x) - window);
      const int x1 = std::min(width - 1, static_cast<int>(ct.x) + window);
      const int y0 = std::max(0, static_cast<int>(ct.y) - window);
      const int y1 = std::min(height - 1, static_cast<int>(ct.y) + window);
      for (int y = y0; y <= y1; ++y) {
        const float dyy = (y - ct.y) * (y - ct.y);
        for (int x = x0; x <= x1; ++x) {
          const std::size_t i = static_cast<std::size_t>(y) * width + x;
          const float dl = lab[3 * i] - ct.l;
          const float da = lab[3 * i + 1] - ct.a;
          const float db = lab[3 * i + 2] - ct.b;
          const float dxy = (x - ct.x) * (x - ct.x) + dyy;
          const float d = dl * dl + da * da + db * db + spatial_w * dxy;
          if (d < best[i]) {
            best[i] = d;
            assign[i] = c;
          }
        }
      }
    }
    // update centers
    std::vector<double> acc(centers.size() * 5, 0.0);
    std::vector<std::uint32_t> cnt(centers.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t c = assign[i];
      acc[c * 5 + 0] += lab[3 * i];
      acc[c * 5 + 1] += lab[3 * i + 1];
      acc[c * 5 + 2] += lab[3 * i + 2];
      acc[c * 5 + 3] += static_cast<double>(i % width);
      acc[c * 5 + 4] += static_cast<double>(i / width);
      ++cnt[c];
    }
    for (std::uint32_t c = 0; c < centers.size(); ++c) {
      if (cnt[c] == 0) continue;
      const double inv = 1.0 / cnt[c];
      centers[c] = Center{static_cast<float>(acc[c * 5 + 0] * inv),
                          static_cast<float>(acc[c * 5 + 1] * inv),
                          static_cast<float>(acc[c * 5 + 2] * inv),
                          static_cast<float>(acc[c * 5 + 3] * inv),
                          static_cast<float>(acc[c * 5 + 4] * inv)};
    }
  }

  // Pixels can stay unreached when windows miss them after center drift;
  // assign those to the nearest center by spatial distance.
  for (std::size_t i = 0; i < n; ++i) {
    if (best[i] == std::numeric_limits<float>::max()) {
      const float px = static_cast<float>(i % width);
      const float py = static_cast<float>(i / width);
      float bd = std::numeric_limits<float>::max();
      for (std::uint32_t c = 0; c < centers.size(); ++c) {
        const float d = (px - centers[c].x) * (px - centers[c].x) +
                        (py - centers[c].y) * (py - centers[c].y);
        if (d < bd) {
          bd = d;
          assign[i] = c;
        }
      }
    }
  }

  return enforce_connectivity(height, width, assign);
}

}  // namespace semfuse
