#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vox3d/errors.hpp"

namespace vox3d {

/// Continuous coordinates in voxel units; voxel centers sit at integers.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

  friend constexpr Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Point3 operator*(double s, Point3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(const Point3&, const Point3&) = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Point3 cross(Point3 a, Point3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Point3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Point3 a, Point3 b) { return norm(a - b); }

/// Integer voxel coordinate.
struct Index3 {
  int x = 0;
  int y = 0;
  int z = 0;

  constexpr int operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr int& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
  friend constexpr bool operator==(const Index3&, const Index3&) = default;

  Point3 to_point() const { return {double(x), double(y), double(z)}; }
};

struct Dims {
  int x = 16;
  int y = 16;
  int z = 16;

  constexpr int operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr std::size_t volume() const { return std::size_t(x) * std::size_t(y) * std::size_t(z); }
  constexpr bool cubic() const { return x == y && y == z; }
  constexpr bool contains(Index3 p) const {
    return p.x >= 0 && p.y >= 0 && p.z >= 0 && p.x < x && p.y < y && p.z < z;
  }
  /// Linear index within one channel: x-major, z fastest.
  constexpr std::size_t linear(Index3 p) const {
    return (std::size_t(p.x) * std::size_t(y) + std::size_t(p.y)) * std::size_t(z) + std::size_t(p.z);
  }
  constexpr Index3 unlinear(std::size_t i) const {
    const int zz = int(i % std::size_t(z));
    i /= std::size_t(z);
    const int yy = int(i % std::size_t(y));
    return {int(i / std::size_t(y)), yy, zz};
  }
  friend constexpr bool operator==(const Dims&, const Dims&) = default;
};

inline std::string to_string(Dims d) {
  return std::to_string(d.x) + "x" + std::to_string(d.y) + "x" + std::to_string(d.z);
}

/// Voxel neighbourhood used for connectivity: faces, +edges, +corners.
enum class Connectivity : int { Face = 6, Edge = 18, Vertex = 26 };

inline Connectivity connectivity_from_int(int n) {
  switch (n) {
    case 6: return Connectivity::Face;
    case 18: return Connectivity::Edge;
    case 26: return Connectivity::Vertex;
    default: throw InvalidConfigError("connectivity must be 6, 18 or 26, got " + std::to_string(n));
  }
}

/// Offsets of the neighbourhood, excluding the origin.
inline std::vector<Index3> neighbor_offsets(Connectivity c) {
  std::vector<Index3> out;
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dz = -1; dz <= 1; ++dz) {
        const int nonzero = (dx != 0) + (dy != 0) + (dz != 0);
        if (nonzero == 0) continue;
        if (c == Connectivity::Face && nonzero > 1) continue;
        if (c == Connectivity::Edge && nonzero > 2) continue;
        out.push_back({dx, dy, dz});
      }
  return out;
}

/// Multi-channel binary 3D lattice. Channel 0 is the main volume, channel 1
/// (when present) holds subspheres. Storage is channel-major, then x, y, z
/// with z fastest, one byte per voxel holding 0 or 1.
class VoxelGrid {
 public:
  explicit VoxelGrid(Dims dims = {}, int channels = 1) : dims_(dims), channels_(channels) {
    if (dims.x < 1 || dims.y < 1 || dims.z < 1)
      throw InvalidConfigError("grid dims must be positive, got " + to_string(dims));
    if (channels < 1) throw InvalidConfigError("grid needs at least one channel");
    data_.assign(dims.volume() * std::size_t(channels), 0);
  }

  Dims dims() const noexcept { return dims_; }
  int channels() const noexcept { return channels_; }
  std::size_t channel_size() const noexcept { return dims_.volume(); }

  bool get(int channel, Index3 p) const { return data_[offset(channel, p)] != 0; }
  bool get(int channel, int x, int y, int z) const { return get(channel, Index3{x, y, z}); }
  void set(int channel, Index3 p, bool v = true) { data_[offset(channel, p)] = v ? 1 : 0; }
  void set(int channel, int x, int y, int z, bool v = true) { set(channel, Index3{x, y, z}, v); }

  /// Out-of-bounds reads are background.
  bool get_or_background(int channel, Index3 p) const { return dims_.contains(p) && get(channel, p); }

  std::span<const std::uint8_t> channel_data(int channel) const {
    check_channel(channel);
    return {data_.data() + std::size_t(channel) * channel_size(), channel_size()};
  }
  std::span<std::uint8_t> channel_data(int channel) {
    check_channel(channel);
    return {data_.data() + std::size_t(channel) * channel_size(), channel_size()};
  }
  std::span<const std::uint8_t> bytes() const { return data_; }
  /// Raw storage for bulk loaders; callers must keep every byte 0 or 1.
  std::span<std::uint8_t> mutable_bytes() { return data_; }

  std::size_t count(int channel) const {
    std::size_t n = 0;
    for (auto v : channel_data(channel)) n += v;
    return n;
  }
  bool empty(int channel) const { return count(channel) == 0; }

  /// Foreground voxel coordinates of a channel in linear-index order.
  std::vector<Index3> foreground(int channel) const {
    std::vector<Index3> out;
    const auto data = channel_data(channel);
    for (std::size_t i = 0; i < data.size(); ++i)
      if (data[i]) out.push_back(dims_.unlinear(i));
    return out;
  }

  void check_channel(int channel) const {
    if (channel < 0 || channel >= channels_)
      throw InvalidInputError("channel " + std::to_string(channel) + " out of range (grid has " +
                              std::to_string(channels_) + ")");
  }

  /// Copy of a single channel as a 1-channel grid.
  VoxelGrid extract_channel(int channel) const {
    VoxelGrid out(dims_, 1);
    const auto src = channel_data(channel);
    std::copy(src.begin(), src.end(), out.data_.begin());
    return out;
  }

  /// Copy with an extra channel appended (empty).
  VoxelGrid with_added_channel() const {
    VoxelGrid out(dims_, channels_ + 1);
    std::copy(data_.begin(), data_.end(), out.data_.begin());
    return out;
  }

  friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

 private:
  std::size_t offset(int channel, Index3 p) const {
    return std::size_t(channel) * channel_size() + dims_.linear(p);
  }

  Dims dims_;
  int channels_;
  std::vector<std::uint8_t> data_;
};

/// Dense per-voxel scalar field with the same layout as one grid channel.
struct ScalarField {
  Dims dims;
  std::vector<double> values;

  double operator()(Index3 p) const { return values[dims.linear(p)]; }
  double at(Index3 p) const { return values.at(dims.linear(p)); }
};

/// Lattice point nearest to p, clamped into the grid.
inline Index3 nearest_voxel(Point3 p, Dims d) {
  auto clampi = [](double v, int hi) {
    const long r = std::lround(v);
    return int(std::min<long>(std::max<long>(r, 0), hi - 1));
  };
  return {clampi(p.x, d.x), clampi(p.y, d.y), clampi(p.z, d.z)};
}

}  // namespace vox3d
