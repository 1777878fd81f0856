#pragma once

#include <array>
#include <vector>

#include "vox3d/grid.hpp"

namespace vox3d {

/// Proper rotation of the cube lattice as a signed axis permutation:
/// out[k] = sign[k] * in[perm[k]].
struct CubeRotation {
  std::array<int, 3> perm{0, 1, 2};
  std::array<int, 3> sign{1, 1, 1};

  static CubeRotation identity() { return {}; }

  int determinant() const {
    int inversions = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) inversions += perm[i] > perm[j];
    const int parity = inversions % 2 == 0 ? 1 : -1;
    return parity * sign[0] * sign[1] * sign[2];
  }

  CubeRotation inverse() const {
    CubeRotation inv;
    for (int k = 0; k < 3; ++k) {
      inv.perm[perm[k]] = k;
      inv.sign[perm[k]] = sign[k];
    }
    return inv;
  }

  /// (this * other)(p) = this(other(p)).
  CubeRotation compose(const CubeRotation& other) const {
    CubeRotation r;
    for (int k = 0; k < 3; ++k) {
      r.perm[k] = other.perm[perm[k]];
      r.sign[k] = sign[k] * other.sign[perm[k]];
    }
    return r;
  }

  /// Rotation about the origin.
  Point3 apply(Point3 p) const {
    Point3 out;
    for (int k = 0; k < 3; ++k) out[k] = sign[k] * p[perm[k]];
    return out;
  }

  /// Rotation of a voxel index about the center of a cubic grid of side n.
  Index3 apply(Index3 p, int n) const {
    Index3 out;
    for (int k = 0; k < 3; ++k) {
      const int centered = 2 * p[perm[k]] - (n - 1);
      out[k] = (sign[k] * centered + (n - 1)) / 2;
    }
    return out;
  }

  friend bool operator==(const CubeRotation&, const CubeRotation&) = default;
};

/// The 24 proper rotations of the cube, identity first.
inline std::vector<CubeRotation> all_cube_rotations() {
  std::vector<CubeRotation> out;
  const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (const auto& p : perms)
    for (int s = 0; s < 8; ++s) {
      CubeRotation r{p, {(s & 1) ? -1 : 1, (s & 2) ? -1 : 1, (s & 4) ? -1 : 1}};
      if (r.determinant() == 1) out.push_back(r);
    }
  return out;
}

/// Rotates every channel of a cubic grid about its center.
inline VoxelGrid rotate_grid_90(const VoxelGrid& grid, const CubeRotation& rotation) {
  const Dims d = grid.dims();
  if (!d.cubic()) throw UnsupportedRotationError("lattice rotation needs a cubic grid, got " + to_string(d));
  if (rotation.determinant() != 1) throw UnsupportedRotationError("not a proper rotation");
  VoxelGrid out(d, grid.channels());
  for (int c = 0; c < grid.channels(); ++c)
    for (const Index3& p : grid.foreground(c)) out.set(c, rotation.apply(p, d.x));
  return out;
}

}  // namespace vox3d
