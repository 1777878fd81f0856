#pragma once

// Independent reference implementations used by the property tests. They are
// deliberately naive: brute force over the whole lattice, exact integer
// arithmetic where possible, no shared code with the library algorithms.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "vox3d/grid.hpp"
#include "vox3d/random.hpp"

namespace oracle {

using vox3d::Dims;
using vox3d::Index3;
using vox3d::Point3;
using vox3d::VoxelGrid;

inline VoxelGrid random_grid(vox3d::Rng& rng, int max_side, double density, int channels = 1) {
  const Dims d{int(1 + rng.below(std::uint64_t(max_side))), int(1 + rng.below(std::uint64_t(max_side))),
               int(1 + rng.below(std::uint64_t(max_side)))};
  VoxelGrid g(d, channels);
  for (int c = 0; c < channels; ++c)
    for (auto& b : g.channel_data(c)) b = rng.bernoulli(density) ? 1 : 0;
  return g;
}

inline bool adjacent(Index3 a, Index3 b, int connectivity) {
  const int dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y), dz = std::abs(a.z - b.z);
  if (std::max({dx, dy, dz}) != 1) return false;
  const int manhattan = dx + dy + dz;
  return connectivity == 26 || (connectivity == 18 && manhattan <= 2) || (connectivity == 6 && manhattan == 1);
}

/// Breadth-first flood fill; labels in discovery order, 0 for background.
inline std::vector<int> flood_fill_labels(const VoxelGrid& g, int channel, int connectivity) {
  const Dims d = g.dims();
  std::vector<int> label(d.volume(), 0);
  int next = 0;
  for (std::size_t s = 0; s < d.volume(); ++s) {
    if (!g.channel_data(channel)[s] || label[s]) continue;
    label[s] = ++next;
    std::deque<Index3> queue{d.unlinear(s)};
    while (!queue.empty()) {
      const Index3 p = queue.front();
      queue.pop_front();
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dz = -1; dz <= 1; ++dz) {
            const Index3 q{p.x + dx, p.y + dy, p.z + dz};
            if (!d.contains(q) || !adjacent(p, q, connectivity)) continue;
            const std::size_t i = d.linear(q);
            if (g.channel_data(channel)[i] && !label[i]) {
              label[i] = next;
              queue.push_back(q);
            }
          }
    }
  }
  return label;
}

/// Squared distance to the nearest background lattice point, in or out of
/// the grid, by exhaustive search.
inline std::vector<double> brute_force_sq_edt(const VoxelGrid& g, int channel) {
  const Dims d = g.dims();
  std::vector<double> out(d.volume(), 0.0);
  std::vector<Index3> background;
  for (std::size_t i = 0; i < d.volume(); ++i)
    if (!g.channel_data(channel)[i]) background.push_back(d.unlinear(i));
  for (std::size_t i = 0; i < d.volume(); ++i) {
    if (!g.channel_data(channel)[i]) continue;
    const Index3 p = d.unlinear(i);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (int k = 0; k < 3; ++k) {
      const std::int64_t edge = std::min(p[k] + 1, d[k] - p[k]);
      best = std::min(best, edge * edge);
    }
    for (const Index3& b : background) {
      const std::int64_t dx = p.x - b.x, dy = p.y - b.y, dz = p.z - b.z;
      best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
    out[i] = double(best);
  }
  return out;
}

using I3 = std::array<std::int64_t, 3>;

inline I3 sub(I3 a, I3 b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline I3 cross(I3 a, I3 b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline std::int64_t dot(I3 a, I3 b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// True when the integer points span 3D.
inline bool full_dimensional(const std::vector<I3>& pts) {
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      for (std::size_t c = b + 1; c < pts.size(); ++c) {
        const I3 n = cross(sub(pts[b], pts[a]), sub(pts[c], pts[a]));
        if (n == I3{0, 0, 0}) continue;
        for (const I3& p : pts)
          if (dot(n, sub(p, pts[a])) != 0) return true;
      }
  return false;
}

/// Lattice points of the hull of a full-dimensional integer point set: every
/// supporting plane through three input points is a half-space constraint.
/// O(n^4) in the point count, exact integer arithmetic.
inline std::size_t brute_force_hull_count(const std::vector<I3>& pts) {
  struct Plane {
    I3 n;
    I3 a;
  };
  std::vector<Plane> planes;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      for (std::size_t c = b + 1; c < pts.size(); ++c) {
        I3 n = cross(sub(pts[b], pts[a]), sub(pts[c], pts[a]));
        if (n == I3{0, 0, 0}) continue;
        bool pos = false, neg = false;
        for (const I3& p : pts) {
          const auto s = dot(n, sub(p, pts[a]));
          pos = pos || s > 0;
          neg = neg || s < 0;
        }
        if (pos && neg) continue;
        if (pos) n = {-n[0], -n[1], -n[2]};
        planes.push_back({n, pts[a]});
      }
  I3 lo = pts[0], hi = pts[0];
  for (const I3& p : pts)
    for (int k = 0; k < 3; ++k) {
      lo[std::size_t(k)] = std::min(lo[std::size_t(k)], p[std::size_t(k)]);
      hi[std::size_t(k)] = std::max(hi[std::size_t(k)], p[std::size_t(k)]);
    }
  std::size_t count = 0;
  for (auto x = lo[0]; x <= hi[0]; ++x)
    for (auto y = lo[1]; y <= hi[1]; ++y)
      for (auto z = lo[2]; z <= hi[2]; ++z) {
        bool inside = true;
        for (const auto& pl : planes)
          if (dot(pl.n, sub({x, y, z}, pl.a)) > 0) {
            inside = false;
            break;
          }
        count += inside;
      }
  return count;
}

/// Discrete Fréchet distance by enumerating every monotone coupling.
inline double exhaustive_frechet(const std::vector<Point3>& a, const std::vector<Point3>& b) {
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double worst) {
    worst = std::max(worst, vox3d::distance(a[i], b[j]));
    if (worst >= best) return;
    if (i + 1 == a.size() && j + 1 == b.size()) {
      best = worst;
      return;
    }
    if (i + 1 < a.size()) walk(i + 1, j, worst);
    if (j + 1 < b.size()) walk(i, j + 1, worst);
    if (i + 1 < a.size() && j + 1 < b.size()) walk(i + 1, j + 1, worst);
  };
  walk(0, 0, 0.0);
  return best;
}

/// Voxel set of a digitized ball of radius r centred on the origin lattice point.
inline std::vector<Index3> lattice_ball(double r, Index3 c = {0, 0, 0}) {
  std::vector<Index3> out;
  const int n = int(std::floor(r));
  for (int x = -n; x <= n; ++x)
    for (int y = -n; y <= n; ++y)
      for (int z = -n; z <= n; ++z)
        if (x * x + y * y + z * z <= r * r) out.push_back({c.x + x, c.y + y, c.z + z});
  return out;
}

}  // namespace oracle
