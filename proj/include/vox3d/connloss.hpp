#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vox3d/labeling.hpp"
#include "vox3d/shapegen.hpp"

namespace vox3d {

/// Component counts for one sample. A single entry means the sample is
/// expected to hold one connected object; two or more entries give CC[i] per
/// expected object.
struct ComponentCounts {
  std::vector<std::int64_t> counts;

  bool multi_object() const noexcept { return counts.size() >= 2; }
};

struct ConnLossInput {
  std::vector<ComponentCounts> samples;
  double lambda3 = 1.0;
};

/// Per-sample term of the connection loss.
inline double connection_loss_term(const ComponentCounts& s, double lambda3) {
  if (s.counts.empty()) throw InvalidBatchError("sample has no expected objects");
  for (auto c : s.counts)
    if (c < 0) throw InvalidBatchError("component counts must be non-negative");
  if (!s.multi_object()) {
    const std::int64_t cc = s.counts[0];
    return double(cc > 1 ? cc - 1 : 1 - cc) - lambda3 * (cc == 1 ? 1.0 : 0.0);
  }
  // Integer accumulation keeps everything exact except the square root.
  std::int64_t squares = 0, ones = 0;
  for (auto c : s.counts) {
    squares += (c - 1) * (c - 1);
    ones += c == 1;
  }
  return std::sqrt(double(squares) / double(s.counts.size())) - lambda3 * double(ones);
}

/// Mean over samples of |CC - 1| - l3 [CC = 1] (single-object batches) or
/// sqrt(mean_i (CC[i] - 1)^2) - l3 sum_i [CC[i] = 1] (multi-object batches).
/// A batch must not mix the two cases.
inline double connection_loss(const ConnLossInput& in) {
  if (in.samples.empty()) throw InvalidBatchError("connection loss needs at least one sample");
  if (!(in.lambda3 >= 0.0)) throw InvalidBatchError("lambda3 must be non-negative");
  const bool multi = in.samples.front().multi_object();
  double sum = 0.0;
  for (const auto& s : in.samples) {
    if (s.multi_object() != multi)
      throw InvalidBatchError("batch mixes single-object and multi-object samples");
    sum += connection_loss_term(s, in.lambda3);
  }
  return sum / double(in.samples.size());
}

/// Maps a sample to its connection-loss entry. Without ground truth the
/// count is the number of components of channel 0. With ground-truth
/// subspheres, CC[i] counts the channel-1 components that touch subsphere i's
/// nominal ball, plus leftover components assigned to i because their
/// centroid is nearest to its center.
inline ComponentCounts component_counts_for_loss(const VoxelGrid& grid, const IsocenterSet* ground_truth,
                                                 Connectivity connectivity = Connectivity::Vertex) {
  if (!ground_truth) {
    return {{std::int64_t(count_components(grid, 0, connectivity))}};
  }
  if (ground_truth->empty()) throw MissingGroundTruthError("ground-truth isocenter set is empty");
  if (grid.channels() < 2) throw InvalidInputError("multi-object counts need a subsphere channel");

  const auto lab = label_components(grid, 1, connectivity);
  const std::size_t k = ground_truth->size();
  ComponentCounts out{std::vector<std::int64_t>(k, 0)};
  const Dims d = grid.dims();

  std::vector<std::vector<bool>> touches(lab.count(), std::vector<bool>(k, false));
  std::vector<Point3> sums(lab.count());
  for (std::size_t i = 0; i < lab.label_map.size(); ++i) {
    const auto l = lab.label_map[i];
    if (!l) continue;
    const Point3 p = d.unlinear(i).to_point();
    sums[l - 1] = sums[l - 1] + p;
    for (std::size_t g = 0; g < k; ++g) {
      const auto& iso = ground_truth->isocenters[g];
      if (distance(p, iso.center) <= iso.radius + kRasterSlack) touches[l - 1][g] = true;
    }
  }
  for (std::size_t c = 0; c < lab.count(); ++c) {
    bool any = false;
    for (std::size_t g = 0; g < k; ++g)
      if (touches[c][g]) {
        ++out.counts[g];
        any = true;
      }
    if (any) continue;
    const Point3 centroid = (1.0 / double(lab.component_sizes[c])) * sums[c];
    std::size_t best = 0;
    for (std::size_t g = 1; g < k; ++g)
      if (distance(centroid, ground_truth->isocenters[g].center) <
          distance(centroid, ground_truth->isocenters[best].center))
        best = g;
    ++out.counts[best];
  }
  return out;
}

}  // namespace vox3d
