#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "vox3d/grid.hpp"

namespace vox3d {

namespace detail {

/// 1D squared-distance transform of a sampled function (lower envelope of
/// parabolas). `f` and `out` have equal length; `v`/`z` are scratch.
inline void edt_1d(std::span<const double> f, std::span<double> out, std::vector<int>& v,
                   std::vector<double>& z) {
  const int n = int(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  v.assign(std::size_t(n), 0);
  z.assign(std::size_t(n) + 1, 0.0);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    auto meet = [&](int p) {
      return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
    };
    double s = meet(v[std::size_t(k)]);
    while (s <= z[std::size_t(k)]) {
      --k;
      s = meet(v[std::size_t(k)]);
    }
    ++k;
    v[std::size_t(k)] = q;
    z[std::size_t(k)] = s;
    z[std::size_t(k) + 1] = inf;
  }
  if (k < 0) {
    for (auto& o : out) o = inf;
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[std::size_t(j) + 1] < q) ++j;
    const int p = v[std::size_t(j)];
    out[q] = double(q - p) * double(q - p) + f[p];
  }
}

/// Squared Euclidean distance to the nearest zero of `mask` on a lattice of
/// dims `d`, with everything outside the lattice counted as zero.
inline std::vector<double> squared_edt(Dims d, std::span<const std::uint8_t> mask) {
  // Pad by one background voxel on every side so out-of-bounds is background.
  const Dims p{d.x + 2, d.y + 2, d.z + 2};
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> g(p.volume(), 0.0);
  for (int x = 0; x < d.x; ++x)
    for (int y = 0; y < d.y; ++y)
      for (int z = 0; z < d.z; ++z)
        if (mask[d.linear({x, y, z})]) g[p.linear({x + 1, y + 1, z + 1})] = inf;

  std::vector<int> v;
  std::vector<double> zs;
  const int longest = std::max({p.x, p.y, p.z});
  std::vector<double> line(static_cast<std::size_t>(longest)), res(static_cast<std::size_t>(longest));

  auto pass = [&](int axis) {
    const int len = p[axis];
    const int a1 = axis == 0 ? 1 : 0;
    const int a2 = axis == 2 ? 1 : 2;
    for (int i = 0; i < p[a1]; ++i)
      for (int j = 0; j < p[a2]; ++j) {
        Index3 idx{};
        idx[a1] = i;
        idx[a2] = j;
        for (int t = 0; t < len; ++t) {
          idx[axis] = t;
          line[std::size_t(t)] = g[p.linear(idx)];
        }
        edt_1d(std::span<const double>(line.data(), std::size_t(len)),
               std::span<double>(res.data(), std::size_t(len)), v, zs);
        for (int t = 0; t < len; ++t) {
          idx[axis] = t;
          g[p.linear(idx)] = res[std::size_t(t)];
        }
      }
  };
  pass(2);
  pass(1);
  pass(0);

  std::vector<double> out(d.volume(), 0.0);
  for (int x = 0; x < d.x; ++x)
    for (int y = 0; y < d.y; ++y)
      for (int z = 0; z < d.z; ++z) out[d.linear({x, y, z})] = g[p.linear({x + 1, y + 1, z + 1})];
  return out;
}

}  // namespace detail

/// Exact Euclidean distance from each foreground voxel center to the nearest
/// background voxel center (out-of-bounds counts as background); 0 on
/// background. Throws EmptyInputError for an all-background channel.
inline ScalarField distance_transform(const VoxelGrid& grid, int channel = 0) {
  const auto data = grid.channel_data(channel);
  bool any = false;
  for (auto b : data) any = any || b;
  if (!any) throw EmptyInputError("distance transform of an empty channel");
  ScalarField out{grid.dims(), detail::squared_edt(grid.dims(), data)};
  for (auto& v : out.values) v = std::sqrt(v);
  return out;
}

}  // namespace vox3d
