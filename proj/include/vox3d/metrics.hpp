#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vox3d/distance.hpp"
#include "vox3d/hull.hpp"
#include "vox3d/labeling.hpp"
#include "vox3d/shapegen.hpp"

namespace vox3d {

/// Defaults admit every training shape: elongated ellipsoids drawn from
/// [2, 7] radii bottom out near 0.91 under the 2-sigma cut, tumors near 0.95.
struct Thresholds {
  double connectivity = 0.90;
  double convexity = 0.70;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline Point3 centroid(std::span<const Index3> voxels) {
  if (voxels.empty()) throw EmptyInputError("centroid of an empty voxel set");
  std::array<std::int64_t, 3> s{};
  for (const Index3& v : voxels)
    for (int k = 0; k < 3; ++k) s[std::size_t(k)] += v[k];
  const double n = double(voxels.size());
  return {double(s[0]) / n, double(s[1]) / n, double(s[2]) / n};
}

inline Point3 volume_centroid(const VoxelGrid& grid, int channel = 0) {
  const auto fg = grid.foreground(channel);
  return centroid(fg);
}

// ---------------------------------------------------------------------------
// Shape metrics

/// Fraction of voxels kept after dropping those farther from the centroid than
/// mean + 2 std of all center distances (single pass).
inline double connectivity_ratio(std::span<const Index3> voxels, double sigmas = 2.0) {
  if (voxels.empty()) throw EmptyInputError("connectivity ratio of an empty set");
  const Point3 c = centroid(voxels);
  std::vector<double> dist;
  dist.reserve(voxels.size());
  CompensatedSum s;
  for (const Index3& v : voxels) {
    dist.push_back(distance(v.to_point(), c));
    s.add(dist.back());
  }
  const double mean = s.value() / double(dist.size());
  CompensatedSum ss;
  for (double d : dist) ss.add((d - mean) * (d - mean));
  const double sd = std::sqrt(ss.value() / double(dist.size()));
  const double cut = mean + sigmas * sd;
  std::size_t kept = 0;
  for (double d : dist) kept += d <= cut;
  return double(kept) / double(dist.size());
}

inline double connectivity_ratio(const VoxelGrid& grid, int channel = 0) {
  const auto fg = grid.foreground(channel);
  if (fg.empty()) throw EmptyInputError("connectivity ratio of an empty channel");
  return connectivity_ratio(fg);
}

/// Solidity: voxel count over the lattice-point count of the convex hull.
inline double convexity_ratio(std::span<const Index3> voxels) {
  if (voxels.empty()) throw EmptyInputError("convexity ratio of an empty set");
  return double(voxels.size()) / double(convex_hull_lattice_count(voxels));
}

inline double convexity_ratio(const VoxelGrid& grid, int channel = 0) {
  const auto fg = grid.foreground(channel);
  if (fg.empty()) throw EmptyInputError("convexity ratio of an empty channel");
  return convexity_ratio(fg);
}

struct ShapeRatios {
  std::optional<double> connectivity;
  std::optional<double> convexity;
};

inline bool passes(const ShapeRatios& r, const Thresholds& t) {
  return r.connectivity && r.convexity && *r.connectivity >= t.connectivity && *r.convexity >= t.convexity;
}

/// Fraction of samples meeting both thresholds. Samples with undefined ratios
/// (empty volumes) fail.
inline double coverage_ratio(std::span<const ShapeRatios> samples, const Thresholds& t) {
  if (samples.empty()) throw EmptyInputError("coverage ratio needs at least one sample");
  std::size_t ok = 0;
  for (const auto& s : samples) ok += passes(s, t);
  return double(ok) / double(samples.size());
}

struct MomentInvariants {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double omega3 = 0.0;
  friend bool operator==(const MomentInvariants&, const MomentInvariants&) = default;
};

/// Second-order invariants of the scale-normalized central moments
/// eta_pqr = mu_pqr / mu_000^(5/3), unit mass per voxel: trace, sum of
/// principal 2x2 minors and determinant of the eta matrix.
inline MomentInvariants moment_invariants(std::span<const Index3> voxels) {
  if (voxels.empty()) throw EmptyInputError("moment invariants of an empty set");
  // Integer sums relative to the bounding-box corner. n * S_pq - S_p * S_q is
  // exact and unchanged by translation; lattice rotations only permute it and
  // flip signs.
  std::array<int, 3> lo{voxels[0].x, voxels[0].y, voxels[0].z};
  for (const Index3& v : voxels)
    for (int k = 0; k < 3; ++k) lo[std::size_t(k)] = std::min(lo[std::size_t(k)], v[k]);
  std::array<std::int64_t, 3> s1{};
  std::array<std::array<std::int64_t, 3>, 3> s2{};
  for (const Index3& v : voxels) {
    std::array<std::int64_t, 3> r{};
    for (int k = 0; k < 3; ++k) r[std::size_t(k)] = v[k] - lo[std::size_t(k)];
    for (std::size_t a = 0; a < 3; ++a) {
      s1[a] += r[a];
      for (std::size_t b = a; b < 3; ++b) s2[a][b] += r[a] * r[b];
    }
  }
  const auto n = std::int64_t(voxels.size());
  // eta = (n S_ab - S_a S_b) / n^(8/3)
  const double norm_factor = std::pow(double(n), 8.0 / 3.0);
  std::array<std::array<double, 3>, 3> eta{};
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a; b < 3; ++b) {
      const std::int64_t m = n * s2[a][b] - s1[a] * s1[b];
      eta[a][b] = eta[b][a] = double(m) / norm_factor;
    }
  MomentInvariants out;
  out.omega1 = eta[0][0] + eta[1][1] + eta[2][2];
  out.omega2 = eta[0][0] * eta[1][1] + eta[1][1] * eta[2][2] + eta[0][0] * eta[2][2] - eta[0][1] * eta[0][1] -
               eta[0][2] * eta[0][2] - eta[1][2] * eta[1][2];
  out.omega3 = eta[0][0] * (eta[1][1] * eta[2][2] - eta[1][2] * eta[1][2]) -
               eta[0][1] * (eta[0][1] * eta[2][2] - eta[1][2] * eta[0][2]) +
               eta[0][2] * (eta[0][1] * eta[1][2] - eta[1][1] * eta[0][2]);
  return out;
}

inline MomentInvariants moment_invariants(const VoxelGrid& grid, int channel = 0) {
  const auto fg = grid.foreground(channel);
  if (fg.empty()) throw EmptyInputError("moment invariants of an empty channel");
  return moment_invariants(fg);
}

/// Semi-axes of an axis-aligned solid ellipsoid with the same second moments:
/// r_k = sqrt(5 var_k).
inline Radii estimate_semi_axes(const VoxelGrid& grid, int channel = 0) {
  const auto fg = grid.foreground(channel);
  if (fg.empty()) throw EmptyInputError("semi-axes of an empty channel");
  const Point3 c = centroid(fg);
  Radii r{};
  for (std::size_t k = 0; k < 3; ++k) {
    CompensatedSum s;
    for (const Index3& v : fg) {
      const double t = v[int(k)] - c[int(k)];
      s.add(t * t);
    }
    r[k] = std::sqrt(5.0 * s.value() / double(fg.size()));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Subsphere metrics

/// Normalized Shannon entropy of component shares, H / log K; 1 for K = 1.
inline double shannon_equitability(std::span<const double> sizes) {
  if (sizes.empty()) throw InvalidInputError("shannon equitability needs at least one component");
  double total = 0.0;
  for (double s : sizes) {
    if (!(s > 0.0)) throw InvalidInputError("component sizes must be positive");
    total += s;
  }
  if (sizes.size() == 1) return 1.0;
  double h = 0.0;
  for (double s : sizes) {
    const double p = s / total;
    h -= p * std::log(p);
  }
  return std::min(1.0, h / std::log(double(sizes.size())));
}

/// |channel1 & channel0| / |channel0|.
inline double subsphere_coverage(const VoxelGrid& grid) {
  if (grid.channels() < 2) throw InvalidInputError("subsphere coverage needs two channels");
  const auto main = grid.channel_data(0);
  const auto sub = grid.channel_data(1);
  std::size_t n0 = 0, both = 0;
  for (std::size_t i = 0; i < main.size(); ++i) {
    n0 += main[i];
    both += main[i] && sub[i];
  }
  if (n0 == 0) throw EmptyInputError("subsphere coverage of an empty main volume");
  return double(both) / double(n0);
}

/// Fraction of channel-1 components that individually meet the thresholds.
inline double connected_subspheres_fraction(const VoxelGrid& grid, const Thresholds& t = {},
                                            Connectivity connectivity = Connectivity::Vertex) {
  if (grid.channels() < 2) throw InvalidInputError("subsphere metrics need two channels");
  const auto lab = label_components(grid, 1, connectivity);
  if (lab.count() == 0) return 0.0;
  std::vector<std::vector<Index3>> comps(lab.count());
  for (std::size_t i = 0; i < lab.label_map.size(); ++i)
    if (lab.label_map[i]) comps[lab.label_map[i] - 1].push_back(lab.dims.unlinear(i));
  std::size_t ok = 0;
  for (const auto& c : comps) ok += passes({connectivity_ratio(c), convexity_ratio(c)}, t);
  return double(ok) / double(comps.size());
}

/// One isocenter per channel component at its centroid, radius of the
/// equal-volume ball. Ordered like the component labels.
inline IsocenterSet extract_isocenters(const VoxelGrid& grid, int channel = 1,
                                       Connectivity connectivity = Connectivity::Vertex) {
  const auto lab = label_components(grid, channel, connectivity);
  std::vector<std::array<std::int64_t, 3>> sums(lab.count(), {0, 0, 0});
  for (std::size_t i = 0; i < lab.label_map.size(); ++i)
    if (const auto l = lab.label_map[i]) {
      const Index3 p = lab.dims.unlinear(i);
      for (int k = 0; k < 3; ++k) sums[l - 1][std::size_t(k)] += p[k];
    }
  IsocenterSet out;
  for (std::size_t c = 0; c < lab.count(); ++c) {
    const double n = double(lab.component_sizes[c]);
    out.isocenters.push_back({{double(sums[c][0]) / n, double(sums[c][1]) / n, double(sums[c][2]) / n},
                              std::cbrt(3.0 * n / (4.0 * std::numbers::pi)),
                              {},
                              {}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Location metrics

/// Discrete Fréchet distance (coupling dynamic program).
inline double discrete_frechet(std::span<const Point3> a, std::span<const Point3> b) {
  if (a.empty() || b.empty()) throw UndefinedMetricError("Fréchet distance of an empty sequence");
  const std::size_t n = a.size(), m = b.size();
  std::vector<double> ca(n * m);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return ca[i * m + j]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double d = distance(a[i], b[j]);
      if (i == 0 && j == 0)
        at(i, j) = d;
      else if (i == 0)
        at(i, j) = std::max(at(0, j - 1), d);
      else if (j == 0)
        at(i, j) = std::max(at(i - 1, 0), d);
      else
        at(i, j) = std::max(std::min({at(i - 1, j), at(i - 1, j - 1), at(i, j - 1)}), d);
    }
  return at(n - 1, m - 1);
}

/// Fréchet error between generated isocenters and canonically ordered
/// reference slots. Each generated point goes to its nearest slot; a slot
/// keeps its closest point and slots without a point are dropped from both
/// sequences.
inline double fd_error(const IsocenterSet& generated, const IsocenterSet& reference) {
  if (generated.empty() || reference.empty()) throw UndefinedMetricError("FD error needs non-empty isocenter sets");
  const std::size_t slots = reference.size();
  std::vector<std::optional<std::size_t>> match(slots);
  for (std::size_t g = 0; g < generated.size(); ++g) {
    const Point3 p = generated.isocenters[g].center;
    std::size_t best = 0;
    for (std::size_t s = 1; s < slots; ++s)
      if (distance(p, reference.isocenters[s].center) < distance(p, reference.isocenters[best].center)) best = s;
    auto& m = match[best];
    if (!m || distance(p, reference.isocenters[best].center) <
                  distance(generated.isocenters[*m].center, reference.isocenters[best].center))
      m = g;
  }
  std::vector<Point3> ref, gen;
  for (std::size_t s = 0; s < slots; ++s)
    if (match[s]) {
      ref.push_back(reference.isocenters[s].center);
      gen.push_back(generated.isocenters[*match[s]].center);
    }
  if (ref.empty()) throw UndefinedMetricError("no generated isocenter matched a reference slot");
  return discrete_frechet(gen, ref);
}

/// Fills D_s (distance transform of channel 0 at the nearest voxel) and D_c
/// (distance to the channel-0 centroid) on every isocenter.
inline void annotate_distances(IsocenterSet& set, const VoxelGrid& grid, int channel = 0) {
  const ScalarField dt = distance_transform(grid, channel);
  const Point3 c = volume_centroid(grid, channel);
  for (auto& iso : set.isocenters) {
    iso.surface_distance = dt(nearest_voxel(iso.center, grid.dims()));
    iso.centroid_distance = distance(iso.center, c);
  }
}

/// Index of the isocenter nearest to a point (the "center" isocenter).
inline std::size_t nearest_isocenter(const IsocenterSet& set, Point3 p) {
  if (set.empty()) throw UndefinedMetricError("no isocenters");
  std::size_t best = 0;
  for (std::size_t i = 1; i < set.size(); ++i)
    if (distance(set.isocenters[i].center, p) < distance(set.isocenters[best].center, p)) best = i;
  return best;
}

struct SurfaceCenterDistances {
  double surface;  // D_s
  double center;   // D_c
};

/// Mean of |0.5 - D_s / (D_s + D_c)|.
inline double ratio_mae(std::span<const SurfaceCenterDistances> items) {
  if (items.empty()) throw UndefinedMetricError("ratio MAE needs at least one non-center isocenter");
  CompensatedSum s;
  for (const auto& it : items) {
    const double denom = it.surface + it.center;
    if (!(denom > 0.0)) throw UndefinedMetricError("isocenter with D_s + D_c = 0");
    s.add(std::abs(0.5 - it.surface / denom));
  }
  return s.value() / double(items.size());
}

/// Ratio MAE over an annotated set, excluding the isocenter closest to the
/// centroid (smallest D_c).
inline double ratio_mae(const IsocenterSet& set) {
  if (set.empty()) throw UndefinedMetricError("ratio MAE of an empty isocenter set");
  std::size_t center = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& iso = set.isocenters[i];
    if (!iso.surface_distance || !iso.centroid_distance)
      throw InvalidInputError("ratio MAE needs D_s and D_c on every isocenter");
    if (*iso.centroid_distance < *set.isocenters[center].centroid_distance) center = i;
  }
  std::vector<SurfaceCenterDistances> items;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (i != center) items.push_back({*set.isocenters[i].surface_distance, *set.isocenters[i].centroid_distance});
  if (items.empty() || std::all_of(items.begin(), items.end(), [](auto& x) { return x.center == 0.0; }))
    throw UndefinedMetricError("all isocenters coincide with the centroid");
  return ratio_mae(items);
}

/// Target set {r_a, r_b, r_c, 1/2 sqrt(r_a^2 + r_b^2), ...}.
inline std::array<double, 6> target_distances(const Radii& r) {
  return {r[0], r[1], r[2], 0.5 * std::hypot(r[0], r[1]), 0.5 * std::hypot(r[0], r[2]), 0.5 * std::hypot(r[1], r[2])};
}

/// For every non-center isocenter, the nearest-neighbour distance to another
/// non-center isocenter is compared to the closest target distance; returns
/// the mean absolute gap. `center` names the isocenter to leave out.
inline double target_distance_error(const IsocenterSet& set, const Radii& radii,
                                    std::optional<std::size_t> center = std::nullopt) {
  if (set.size() < 2) throw UndefinedMetricError("target distance error needs >= 2 isocenters");
  if (center && *center >= set.size()) throw InvalidInputError("center index out of range");
  const auto targets = target_distances(radii);
  CompensatedSum s;
  std::size_t n = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (center && i == *center) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (j == i || (center && j == *center)) continue;
      nearest = std::min(nearest, distance(set.isocenters[i].center, set.isocenters[j].center));
    }
    if (!std::isfinite(nearest)) continue;
    double gap = std::numeric_limits<double>::infinity();
    for (double t : targets) gap = std::min(gap, std::abs(nearest - t));
    s.add(gap);
    ++n;
  }
  if (n == 0) throw UndefinedMetricError("target distance error needs two non-center isocenters");
  return s.value() / double(n);
}

// ---------------------------------------------------------------------------
// Distribution comparison

struct HistogramPair {
  std::vector<double> edges;  // bins + 1
  std::vector<double> p_real;
  std::vector<double> p_generated;
};

/// Shared equal-width bins over the pooled range, additive smoothing by eps,
/// renormalized. A degenerate range gives a single bin holding everything.
inline HistogramPair histogram_pair(std::span<const double> real, std::span<const double> generated, int bins,
                                    double eps) {
  if (real.empty() || generated.empty()) throw EmptyInputError("histograms need non-empty value lists");
  if (bins < 1) throw InvalidConfigError("bins must be >= 1");
  if (!(eps >= 0.0)) throw InvalidConfigError("eps must be >= 0");
  double lo = real[0], hi = real[0];
  for (auto list : {real, generated})
    for (double v : list) {
      if (!std::isfinite(v)) throw InvalidInputError("histogram values must be finite");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  HistogramPair h;
  if (hi == lo) {
    h.edges = {lo, hi};
    h.p_real = {1.0};
    h.p_generated = {1.0};
    return h;
  }
  h.edges.resize(std::size_t(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.edges[std::size_t(i)] = lo + (hi - lo) * double(i) / double(bins);
  auto fill = [&](std::span<const double> vals) {
    std::vector<double> p(std::size_t(bins), 0.0);
    for (double v : vals) {
      auto b = std::size_t(std::floor((v - lo) / (hi - lo) * double(bins)));
      p[std::min(b, std::size_t(bins) - 1)] += 1.0;
    }
    const double denom = 1.0 + double(bins) * eps;
    for (auto& x : p) x = (x / double(vals.size()) + eps) / denom;
    return p;
  };
  h.p_real = fill(real);
  h.p_generated = fill(generated);
  return h;
}

inline double kl_divergence(const HistogramPair& h) {
  double kl = 0.0;
  for (std::size_t i = 0; i < h.p_real.size(); ++i) {
    const double p = h.p_real[i], q = h.p_generated[i];
    if (p > 0.0) kl += p * std::log(p / q);
  }
  return std::max(kl, 0.0);
}

/// KL(P_real || P_generated) over shared histograms.
inline double kl_divergence_hist(std::span<const double> real, std::span<const double> generated, int bins = 32,
                                 double eps = 1e-10) {
  return kl_divergence(histogram_pair(real, generated, bins, eps));
}

}  // namespace vox3d
