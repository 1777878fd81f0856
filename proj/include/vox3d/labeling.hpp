#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "vox3d/grid.hpp"

namespace vox3d {

struct ComponentLabeling {
  Dims dims;
  Connectivity connectivity = Connectivity::Vertex;
  /// Per-voxel label, 0 = background, components numbered 1..K.
  std::vector<std::uint32_t> label_map;
  /// component_sizes[k - 1] is the voxel count of label k; non-increasing.
  std::vector<std::size_t> component_sizes;

  std::size_t count() const noexcept { return component_sizes.size(); }
  std::uint32_t label(Index3 p) const { return label_map[dims.linear(p)]; }

  /// Voxels of component `label` in linear-index order.
  std::vector<Index3> voxels(std::uint32_t label) const {
    std::vector<Index3> out;
    for (std::size_t i = 0; i < label_map.size(); ++i)
      if (label_map[i] == label) out.push_back(dims.unlinear(i));
    return out;
  }
};

/// Connected components of one channel. Labels are ordered by size
/// (largest = 1), ties broken by the smallest linear voxel index.
inline ComponentLabeling label_components(const VoxelGrid& grid, int channel = 0,
                                          Connectivity connectivity = Connectivity::Vertex) {
  const auto data = grid.channel_data(channel);
  const Dims d = grid.dims();
  const auto offsets = neighbor_offsets(connectivity);

  std::vector<std::uint32_t> raw(data.size(), 0);
  std::vector<std::size_t> sizes;       // by raw label - 1
  std::vector<std::size_t> stack;

  // Scanning in linear order means raw labels are already ordered by their
  // smallest voxel index.
  for (std::size_t seed = 0; seed < data.size(); ++seed) {
    if (!data[seed] || raw[seed]) continue;
    const auto id = std::uint32_t(sizes.size() + 1);
    std::size_t size = 0;
    raw[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      ++size;
      const Index3 p = d.unlinear(cur);
      for (const Index3& o : offsets) {
        const Index3 q{p.x + o.x, p.y + o.y, p.z + o.z};
        if (!d.contains(q)) continue;
        const std::size_t qi = d.linear(q);
        if (data[qi] && !raw[qi]) {
          raw[qi] = id;
          stack.push_back(qi);
        }
      }
    }
    sizes.push_back(size);
  }

  std::vector<std::uint32_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return sizes[a] > sizes[b]; });
  std::vector<std::uint32_t> remap(sizes.size() + 1, 0);
  ComponentLabeling out{d, connectivity, {}, {}};
  out.component_sizes.reserve(sizes.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    remap[order[rank] + 1] = std::uint32_t(rank + 1);
    out.component_sizes.push_back(sizes[order[rank]]);
  }
  out.label_map.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out.label_map[i] = remap[raw[i]];
  return out;
}

inline std::size_t count_components(const VoxelGrid& grid, int channel = 0,
                                     Connectivity connectivity = Connectivity::Vertex) {
  return label_components(grid, channel, connectivity).count();
}

}  // namespace vox3d
