#pragma once

#include <array>
#include <cmath>
#include <string>

#include "vox3d/grid.hpp"

namespace vox3d {

/// Axis-aligned semi-axes (r1, r2, r3) in voxel units.
using Radii = std::array<double, 3>;

/// Relative slack on the membership test so lattice points lying exactly on
/// the surface (e.g. (3,4,0) on a radius-5 sphere) are not lost to rounding.
inline constexpr double kRasterSlack = 1e-12;

inline bool inside_ellipsoid(Point3 p, Point3 center, const Radii& radii) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double t = (p[k] - center[k]) / radii[k];
    s += t * t;
  }
  return s <= 1.0 + kRasterSlack;
}

/// Sets every voxel whose center satisfies sum(((c_k - p_k) / r_k)^2) <= 1 on
/// the given channel, leaving all other voxels untouched. The shape is clipped
/// to the grid. Throws EmptyRasterizationError when no voxel center qualifies.
inline VoxelGrid rasterize_ellipsoid(VoxelGrid grid, Point3 center, const Radii& radii, int channel = 0) {
  grid.check_channel(channel);
  if (!center.finite()) throw InvalidInputError("ellipsoid center must be finite");
  for (double r : radii)
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInputError("ellipsoid radii must be positive");
  const Dims d = grid.dims();
  for (int k = 0; k < 3; ++k)
    if (center[k] < -0.5 || center[k] > d[k] - 0.5)
      throw InvalidInputError("ellipsoid center outside grid bounds");

  std::array<int, 3> lo{}, hi{};
  for (int k = 0; k < 3; ++k) {
    lo[k] = std::max(0, int(std::floor(center[k] - radii[k])));
    hi[k] = std::min(d[k] - 1, int(std::ceil(center[k] + radii[k])));
  }
  std::size_t hits = 0;
  for (int x = lo[0]; x <= hi[0]; ++x)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int z = lo[2]; z <= hi[2]; ++z)
        if (inside_ellipsoid({double(x), double(y), double(z)}, center, radii)) {
          grid.set(channel, x, y, z);
          ++hits;
        }
  if (hits == 0)
    throw EmptyRasterizationError("ellipsoid with radii (" + std::to_string(radii[0]) + ", " +
                                  std::to_string(radii[1]) + ", " + std::to_string(radii[2]) +
                                  ") covers no voxel center");
  return grid;
}

}  // namespace vox3d
