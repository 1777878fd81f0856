#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "vox3d/distance.hpp"
#include "vox3d/grid.hpp"
#include "vox3d/hull.hpp"
#include "vox3d/labeling.hpp"
#include "vox3d/random.hpp"
#include "vox3d/rasterize.hpp"

namespace vox3d {

enum class ShapeKind { Sphere, Ellipsoid, Tumor };

inline const char* to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::Sphere: return "sphere";
    case ShapeKind::Ellipsoid: return "ellipsoid";
    case ShapeKind::Tumor: return "tumor";
  }
  return "?";
}

struct ShapeSpec {
  ShapeKind kind = ShapeKind::Sphere;
  Point3 center;
  Radii radii{1.0, 1.0, 1.0};
  std::uint64_t seed = 0;
};

struct Isocenter {
  Point3 center;
  double radius = 0.0;
  /// Distance to the volume surface (distance-transform value), when computed.
  std::optional<double> surface_distance;
  /// Distance to the volume centroid, when computed.
  std::optional<double> centroid_distance;
};

struct IsocenterSet {
  std::vector<Isocenter> isocenters;

  std::size_t size() const noexcept { return isocenters.size(); }
  bool empty() const noexcept { return isocenters.empty(); }
  std::vector<Point3> centers() const {
    std::vector<Point3> out;
    for (const auto& i : isocenters) out.push_back(i.center);
    return out;
  }
};

/// Distribution of tumor voxel counts.
struct SizeDistribution {
  enum class Family { LogNormal, Histogram };
  Family family = Family::LogNormal;
  double median = 250.0;
  double sigma = 0.35;
  /// Histogram family: bin edges (size + 1 of weights) and relative weights.
  std::vector<double> edges;
  std::vector<double> weights;
  std::size_t min_size = 20;
  std::size_t cap = 4096;

  void validate(Dims dims) const {
    if (cap == 0 || cap > dims.volume())
      throw InvalidConfigError("size cap must lie in (0, " + std::to_string(dims.volume()) + "]");
    if (min_size == 0 || min_size > cap) throw InvalidConfigError("size floor must lie in (0, cap]");
    if (family == Family::LogNormal) {
      if (!(median > 0.0) || !(sigma >= 0.0)) throw InvalidConfigError("lognormal needs median > 0, sigma >= 0");
    } else {
      if (weights.empty() || edges.size() != weights.size() + 1)
        throw InvalidConfigError("histogram needs edges.size() == weights.size() + 1");
      double total = 0.0;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0.0 || !(edges[i + 1] > edges[i])) throw InvalidConfigError("malformed histogram");
        total += weights[i];
      }
      if (!(total > 0.0)) throw InvalidConfigError("histogram weights sum to zero");
    }
  }

  std::size_t sample(Rng& rng) const {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      double v;
      if (family == Family::LogNormal) {
        v = median * std::exp(sigma * rng.normal());
      } else {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = rng.uniform() * total;
        std::size_t bin = 0;
        while (bin + 1 < weights.size() && u >= weights[bin]) u -= weights[bin++];
        v = rng.uniform(edges[bin], edges[bin + 1]);
      }
      const double r = std::round(v);
      if (r >= double(min_size) && r <= double(cap)) return std::size_t(r);
    }
    throw GenerationFailureError("size distribution never produced a size in [min_size, cap]", 10000);
  }
};

/// Sampler for sphere/ellipsoid volumes (datasets 1 and 2).
struct VolumeConfig {
  Dims dims{16, 16, 16};
  double r_min = 2.0;
  double r_max = 7.0;
  double sphere_probability = 0.5;
  /// Snap the shape center to a voxel center.
  bool lattice_center = false;
  int max_retries = 100;

  void validate() const {
    if (!(r_min >= 1.0)) throw InvalidConfigError("r_min must be >= 1.0");
    if (!(r_max >= r_min)) throw InvalidConfigError("r_max must be >= r_min");
    const int side = std::min({dims.x, dims.y, dims.z});
    const double limit = lattice_center ? (side - 2) / 2.0 : (side - 1) / 2.0;
    if (r_max > limit)
      throw InvalidConfigError("radius " + std::to_string(r_max) + " cannot fit a " + to_string(dims) + " grid");
    if (sphere_probability < 0.0 || sphere_probability > 1.0)
      throw InvalidConfigError("sphere probability must lie in [0, 1]");
    if (max_retries < 1) throw InvalidConfigError("max_retries must be >= 1");
  }
};

/// Draw `attempt` of the shape sampler for a given sample seed.
inline ShapeSpec sample_shape_spec(const VolumeConfig& cfg, std::uint64_t seed, int attempt = 0) {
  cfg.validate();
  Rng rng(mix_seed(seed, std::uint64_t(attempt)));
  ShapeSpec spec;
  spec.seed = seed;
  spec.kind = rng.bernoulli(cfg.sphere_probability) ? ShapeKind::Sphere : ShapeKind::Ellipsoid;
  if (spec.kind == ShapeKind::Sphere) {
    spec.radii.fill(rng.uniform(cfg.r_min, cfg.r_max));
  } else {
    for (auto& r : spec.radii) r = rng.uniform(cfg.r_min, cfg.r_max);
  }
  for (int k = 0; k < 3; ++k) {
    const double lo = spec.radii[std::size_t(k)];
    const double hi = cfg.dims[k] - 1 - spec.radii[std::size_t(k)];
    spec.center[k] = cfg.lattice_center ? double(rng.range(int(std::ceil(lo)), int(std::floor(hi))))
                                        : rng.uniform(lo, hi);
  }
  return spec;
}

/// Rasterizes a sphere/ellipsoid spec into a fresh 1-channel grid.
inline VoxelGrid gen_connected_volume(const ShapeSpec& spec, Dims dims = {}) {
  return rasterize_ellipsoid(VoxelGrid(dims, 1), spec.center, spec.radii, 0);
}

inline bool digitally_convex(const VoxelGrid& grid, int channel) {
  const auto fg = grid.foreground(channel);
  return !fg.empty() && convex_hull_lattice_count(std::span<const Index3>(fg)) == fg.size();
}

/// Dataset 1 sample: a single 26-connected, digitally convex sphere or
/// ellipsoid. Draws that violate either property are resampled.
inline VoxelGrid gen_connected_volume(const VolumeConfig& cfg, std::uint64_t seed, ShapeSpec* used = nullptr) {
  cfg.validate();
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    const ShapeSpec spec = sample_shape_spec(cfg, seed, attempt);
    VoxelGrid g = gen_connected_volume(spec, cfg.dims);
    if (count_components(g) != 1 || !digitally_convex(g, 0)) continue;
    if (used) *used = spec;
    return g;
  }
  throw GenerationFailureError("no connected convex volume for seed " + std::to_string(seed), cfg.max_retries);
}

/// The seven canonical isocenters of a sphere/ellipsoid: the center, then
/// c +/- (r_k / 2) e_k for x, y, z. Radii are the nominal subsphere radii
/// (r_k / 4 on axis k, min(r) / 4 at the center).
inline IsocenterSet canonical_isocenters(Point3 center, const Radii& radii) {
  IsocenterSet out;
  const double rmin = std::min({radii[0], radii[1], radii[2]});
  out.isocenters.push_back({center, rmin / 4.0, {}, {}});
  for (int k = 0; k < 3; ++k)
    for (double s : {1.0, -1.0}) {
      Point3 p = center;
      p[k] += s * radii[std::size_t(k)] / 2.0;
      out.isocenters.push_back({p, radii[std::size_t(k)] / 4.0, {}, {}});
    }
  return out;
}

struct PackedVolume {
  VoxelGrid grid;  // 2 channels
  IsocenterSet isocenters;
};

/// Dataset 2 construction from an explicit spec. Channel 1 is the union of the
/// seven subspheres, each digitized at `fill` times its nominal radius.
inline PackedVolume gen_packed_volume(const ShapeSpec& spec, Dims dims = {}, double fill = 0.6) {
  const double rmin = std::min({spec.radii[0], spec.radii[1], spec.radii[2]});
  if (rmin / 4.0 < 1.0) throw InvalidConfigError("packed volumes need r / 4 >= 1");
  if (!(fill > 0.0) || fill > 1.0) throw InvalidConfigError("subsphere fill must lie in (0, 1]");
  VoxelGrid grid = rasterize_ellipsoid(VoxelGrid(dims, 2), spec.center, spec.radii, 0);
  IsocenterSet isos = canonical_isocenters(spec.center, spec.radii);
  for (const auto& iso : isos.isocenters) {
    const double r = fill * iso.radius;
    grid = rasterize_ellipsoid(std::move(grid), iso.center, {r, r, r}, 1);
  }
  const auto main = grid.channel_data(0);
  const auto sub = grid.channel_data(1);
  for (std::size_t i = 0; i < main.size(); ++i)
    if (sub[i] && !main[i]) throw InternalConsistencyError("subsphere escapes the main volume");
  return {std::move(grid), std::move(isos)};
}

struct PackedConfig {
  VolumeConfig volume{.dims = {16, 16, 16}, .r_min = 4.0, .r_max = 7.0, .sphere_probability = 0.5,
                      .lattice_center = true, .max_retries = 100};
  double subsphere_fill = 0.6;
};

/// Dataset 2 sample: resampled until channel 0 is one convex component and
/// channel 1 holds exactly seven components.
inline PackedVolume gen_packed_volume(const PackedConfig& cfg, std::uint64_t seed, ShapeSpec* used = nullptr) {
  cfg.volume.validate();
  if (cfg.volume.r_min < 4.0) throw InvalidConfigError("packed volumes need r_min >= 4 so that r / 4 >= 1");
  for (int attempt = 0; attempt < cfg.volume.max_retries; ++attempt) {
    const ShapeSpec spec = sample_shape_spec(cfg.volume, seed, attempt);
    PackedVolume pv;
    try {
      pv = gen_packed_volume(spec, cfg.volume.dims, cfg.subsphere_fill);
    } catch (const EmptyRasterizationError&) {
      continue;
    }
    if (count_components(pv.grid, 0) != 1 || !digitally_convex(pv.grid, 0)) continue;
    if (count_components(pv.grid, 1) != 7) continue;
    if (used) *used = spec;
    return pv;
  }
  throw GenerationFailureError("no separable packed volume for seed " + std::to_string(seed),
                               cfg.volume.max_retries);
}

struct TumorConfig {
  Dims dims{16, 16, 16};
  SizeDistribution sizes;
  int min_ellipsoids = 2;
  int max_ellipsoids = 5;
  /// Per-axis radius as a fraction of the target's equivalent-ball radius.
  double radius_lo = 0.45;
  double radius_hi = 0.95;
  /// Accepted relative deviation from the drawn size.
  double size_tolerance = 0.15;
  int max_retries = 400;

  void validate() const {
    sizes.validate(dims);
    if (min_ellipsoids < 1 || max_ellipsoids < min_ellipsoids) throw InvalidConfigError("bad ellipsoid count range");
    if (!(radius_lo > 0.0) || radius_hi < radius_lo) throw InvalidConfigError("bad tumor radius range");
    if (!(size_tolerance > 0.0)) throw InvalidConfigError("size tolerance must be positive");
    if (max_retries < 1) throw InvalidConfigError("max_retries must be >= 1");
  }
};

namespace detail {

inline bool touches_boundary(const VoxelGrid& g, int channel) {
  const Dims d = g.dims();
  for (const Index3& p : g.foreground(channel))
    if (p.x == 0 || p.y == 0 || p.z == 0 || p.x == d.x - 1 || p.y == d.y - 1 || p.z == d.z - 1) return true;
  return false;
}

}  // namespace detail

/// Dataset 3 sample: a chained union of 2-5 random ellipsoids whose voxel
/// count matches a size drawn from the configured distribution. Draws that
/// are disconnected, touch the grid border, or miss the size are resampled
/// with an adaptively corrected scale.
inline VoxelGrid gen_tumor_volume(const TumorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng size_rng(mix_seed(seed, 0xfeedULL));
  const std::size_t target = cfg.sizes.sample(size_rng);
  const double eq_radius = std::cbrt(3.0 * double(target) / (4.0 * std::numbers::pi));
  const Point3 mid{(cfg.dims.x - 1) / 2.0, (cfg.dims.y - 1) / 2.0, (cfg.dims.z - 1) / 2.0};

  double scale = 1.0;
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Rng rng(mix_seed(seed, std::uint64_t(attempt)));
    const int pieces = rng.range(cfg.min_ellipsoids, cfg.max_ellipsoids);
    VoxelGrid g(cfg.dims, 1);
    for (int j = 0; j < pieces; ++j) {
      Point3 c;
      if (j == 0) {
        c = mid + Point3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      } else {
        const auto fg = g.foreground(0);
        const Index3 anchor = fg[std::size_t(rng.below(fg.size()))];
        c = anchor.to_point() + Point3{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        for (int k = 0; k < 3; ++k) c[k] = std::clamp(c[k], 0.0, double(cfg.dims[k] - 1));
      }
      Radii r;
      for (auto& v : r) v = std::max(1.0, scale * eq_radius * rng.uniform(cfg.radius_lo, cfg.radius_hi));
      g = rasterize_ellipsoid(std::move(g), c, r, 0);
    }
    const std::size_t size = g.count(0);
    if (std::abs(double(size) - double(target)) > cfg.size_tolerance * double(target)) {
      scale *= std::clamp(std::cbrt(double(target) / double(size)), 0.8, 1.25);
      continue;
    }
    if (detail::touches_boundary(g, 0)) {
      scale *= 0.97;
      continue;
    }
    if (count_components(g) != 1) continue;
    return g;
  }
  throw GenerationFailureError("no tumor volume of size " + std::to_string(target) + " for seed " +
                                   std::to_string(seed),
                               cfg.max_retries);
}

struct PackConfig {
  double r_min = 1.0;
  double coverage_target = 0.95;
  int max_isocenters = 20;

  void validate() const {
    if (!(r_min >= 1.0)) throw InvalidConfigError("packing r_min must be >= 1.0");
    if (coverage_target < 0.0 || coverage_target > 1.0) throw InvalidConfigError("coverage target must lie in [0, 1]");
    if (max_isocenters < 0) throw InvalidConfigError("max_isocenters must be >= 0");
  }
};

enum class PackStop { CoverageReached, BelowMinRadius, MaxIsocenters };

inline const char* to_string(PackStop s) {
  switch (s) {
    case PackStop::CoverageReached: return "coverage_reached";
    case PackStop::BelowMinRadius: return "below_min_radius";
    case PackStop::MaxIsocenters: return "max_isocenters";
  }
  return "?";
}

struct PackResult {
  IsocenterSet isocenters;
  /// Foreground voxels covered by the packed spheres (1 channel).
  VoxelGrid covered;
  double covered_fraction = 0.0;
  PackStop stop = PackStop::CoverageReached;
};

/// Grassfire + sphere packing. Each round takes the distance transform of the
/// still-uncovered foreground (covered voxels count as background), places a
/// sphere at the deepest uncovered voxel (ties: smallest linear index) with
/// radius equal to that depth, and marks every foreground voxel within the
/// radius as covered. Stops on coverage, cap, or a depth below r_min, checked
/// in that order.
inline PackResult pack_isocenters(const VoxelGrid& volume, const PackConfig& cfg, int channel = 0) {
  cfg.validate();
  const Dims d = volume.dims();
  const auto fg = volume.channel_data(channel);
  std::size_t total = 0;
  for (auto b : fg) total += b;
  if (total == 0) throw EmptyInputError("cannot pack an empty volume");

  PackResult out{{}, VoxelGrid(d, 1), 0.0, PackStop::CoverageReached};
  auto covered = out.covered.channel_data(0);
  std::size_t covered_count = 0;
  std::vector<std::uint8_t> open(fg.begin(), fg.end());

  for (;;) {
    out.covered_fraction = double(covered_count) / double(total);
    if (out.covered_fraction >= cfg.coverage_target) {
      out.stop = PackStop::CoverageReached;
      break;
    }
    if (int(out.isocenters.size()) >= cfg.max_isocenters) {
      out.stop = PackStop::MaxIsocenters;
      break;
    }
    const auto sq = detail::squared_edt(d, open);
    std::size_t best = sq.size();
    for (std::size_t i = 0; i < sq.size(); ++i)
      if (open[i] && (best == sq.size() || sq[i] > sq[best])) best = i;
    const double depth = std::sqrt(sq[best]);
    if (depth < cfg.r_min) {
      out.stop = PackStop::BelowMinRadius;
      break;
    }
    const Index3 c = d.unlinear(best);
    out.isocenters.isocenters.push_back({c.to_point(), depth, {}, {}});
    const int reach = int(std::floor(depth));
    for (int x = std::max(0, c.x - reach); x <= std::min(d.x - 1, c.x + reach); ++x)
      for (int y = std::max(0, c.y - reach); y <= std::min(d.y - 1, c.y + reach); ++y)
        for (int z = std::max(0, c.z - reach); z <= std::min(d.z - 1, c.z + reach); ++z) {
          const double dd = double(x - c.x) * (x - c.x) + double(y - c.y) * (y - c.y) + double(z - c.z) * (z - c.z);
          const std::size_t i = d.linear({x, y, z});
          if (dd <= sq[best] && fg[i] && !covered[i]) {
            covered[i] = 1;
            open[i] = 0;
            ++covered_count;
          }
        }
  }
  return out;
}

/// Lattice points strictly within `radius` of `center` that are background or
/// outside the grid. Zero for every sphere emitted by pack_isocenters.
inline std::size_t sphere_escape_count(const VoxelGrid& volume, int channel, Point3 center, double radius) {
  std::size_t bad = 0;
  const int reach = int(std::ceil(radius));
  const Index3 c = nearest_voxel(center, volume.dims());
  for (int x = c.x - reach; x <= c.x + reach; ++x)
    for (int y = c.y - reach; y <= c.y + reach; ++y)
      for (int z = c.z - reach; z <= c.z + reach; ++z) {
        const Point3 p{double(x), double(y), double(z)};
        if (distance(p, center) < radius - 1e-12 && !volume.get_or_background(channel, {x, y, z})) ++bad;
      }
  return bad;
}

}  // namespace vox3d
