#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vox3d/dataset.hpp"
#include "vox3d/evaluate.hpp"

namespace vox3d {

using json = nlohmann::json;

inline constexpr const char* kManifestFormat = "vox3d-manifest";
inline constexpr const char* kReportFormat = "vox3d-metrics-report";
inline constexpr int kJsonVersion = 1;

namespace detail {

template <class T>
json opt_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_from_json(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing JSON field '") + key + "'", 0);
  return j.at(key);
}

template <class T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline void to_json(json& j, const Dims& d) { j = json::array({d.x, d.y, d.z}); }
inline void from_json(const json& j, Dims& d) {
  if (!j.is_array() || j.size() != 3) throw ParseError("dims must be a 3-element array", 0);
  d = {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

inline void to_json(json& j, const Point3& p) { j = json::array({p.x, p.y, p.z}); }
inline void from_json(const json& j, Point3& p) {
  if (!j.is_array() || j.size() != 3) throw ParseError("point must be a 3-element array", 0);
  p = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

NLOHMANN_JSON_SERIALIZE_ENUM(ShapeKind, {{ShapeKind::Sphere, "sphere"},
                                         {ShapeKind::Ellipsoid, "ellipsoid"},
                                         {ShapeKind::Tumor, "tumor"}})
NLOHMANN_JSON_SERIALIZE_ENUM(PackStop, {{PackStop::CoverageReached, "coverage_reached"},
                                        {PackStop::BelowMinRadius, "below_min_radius"},
                                        {PackStop::MaxIsocenters, "max_isocenters"}})
NLOHMANN_JSON_SERIALIZE_ENUM(SizeDistribution::Family, {{SizeDistribution::Family::LogNormal, "lognormal"},
                                                        {SizeDistribution::Family::Histogram, "histogram"}})

inline void to_json(json& j, DatasetKind k) { j = to_string(k); }
inline void from_json(const json& j, DatasetKind& k) { k = dataset_kind_from_string(j.get<std::string>()); }

inline void to_json(json& j, Connectivity c) { j = int(c); }
inline void from_json(const json& j, Connectivity& c) { c = connectivity_from_int(j.get<int>()); }

inline void to_json(json& j, const ShapeSpec& s) {
  j = {{"kind", s.kind}, {"center", s.center}, {"radii", s.radii}, {"seed", s.seed}};
}
inline void from_json(const json& j, ShapeSpec& s) {
  s.kind = detail::require(j, "kind").get<ShapeKind>();
  s.center = detail::require(j, "center").get<Point3>();
  s.radii = detail::require(j, "radii").get<Radii>();
  detail::read_if(j, "seed", s.seed);
}

inline void to_json(json& j, const Isocenter& i) {
  j = {{"center", i.center}, {"radius", i.radius}};
  if (i.surface_distance) j["surface_distance"] = *i.surface_distance;
  if (i.centroid_distance) j["centroid_distance"] = *i.centroid_distance;
}
inline void from_json(const json& j, Isocenter& i) {
  i.center = detail::require(j, "center").get<Point3>();
  i.radius = detail::require(j, "radius").get<double>();
  i.surface_distance = detail::opt_from_json<double>(j, "surface_distance");
  i.centroid_distance = detail::opt_from_json<double>(j, "centroid_distance");
}

inline void to_json(json& j, const IsocenterSet& s) { j = s.isocenters; }
inline void from_json(const json& j, IsocenterSet& s) { s.isocenters = j.get<std::vector<Isocenter>>(); }

inline void to_json(json& j, const SizeDistribution& s) {
  j = {{"family", s.family}, {"median", s.median}, {"sigma", s.sigma}, {"edges", s.edges},
       {"weights", s.weights}, {"min_size", s.min_size}, {"cap", s.cap}};
}
inline void from_json(const json& j, SizeDistribution& s) {
  detail::read_if(j, "family", s.family);
  detail::read_if(j, "median", s.median);
  detail::read_if(j, "sigma", s.sigma);
  detail::read_if(j, "edges", s.edges);
  detail::read_if(j, "weights", s.weights);
  detail::read_if(j, "min_size", s.min_size);
  detail::read_if(j, "cap", s.cap);
}

inline void to_json(json& j, const VolumeConfig& c) {
  j = {{"dims", c.dims},
       {"r_min", c.r_min},
       {"r_max", c.r_max},
       {"sphere_probability", c.sphere_probability},
       {"lattice_center", c.lattice_center},
       {"max_retries", c.max_retries}};
}
inline void from_json(const json& j, VolumeConfig& c) {
  detail::read_if(j, "dims", c.dims);
  detail::read_if(j, "r_min", c.r_min);
  detail::read_if(j, "r_max", c.r_max);
  detail::read_if(j, "sphere_probability", c.sphere_probability);
  detail::read_if(j, "lattice_center", c.lattice_center);
  detail::read_if(j, "max_retries", c.max_retries);
}

inline void to_json(json& j, const PackedConfig& c) {
  j = {{"volume", c.volume}, {"subsphere_fill", c.subsphere_fill}};
}
inline void from_json(const json& j, PackedConfig& c) {
  detail::read_if(j, "volume", c.volume);
  detail::read_if(j, "subsphere_fill", c.subsphere_fill);
}

inline void to_json(json& j, const TumorConfig& c) {
  j = {{"dims", c.dims},
       {"sizes", c.sizes},
       {"min_ellipsoids", c.min_ellipsoids},
       {"max_ellipsoids", c.max_ellipsoids},
       {"radius_lo", c.radius_lo},
       {"radius_hi", c.radius_hi},
       {"size_tolerance", c.size_tolerance},
       {"max_retries", c.max_retries}};
}
inline void from_json(const json& j, TumorConfig& c) {
  detail::read_if(j, "dims", c.dims);
  detail::read_if(j, "sizes", c.sizes);
  detail::read_if(j, "min_ellipsoids", c.min_ellipsoids);
  detail::read_if(j, "max_ellipsoids", c.max_ellipsoids);
  detail::read_if(j, "radius_lo", c.radius_lo);
  detail::read_if(j, "radius_hi", c.radius_hi);
  detail::read_if(j, "size_tolerance", c.size_tolerance);
  detail::read_if(j, "max_retries", c.max_retries);
}

inline void to_json(json& j, const PackConfig& c) {
  j = {{"r_min", c.r_min}, {"coverage_target", c.coverage_target}, {"max_isocenters", c.max_isocenters}};
}
inline void from_json(const json& j, PackConfig& c) {
  detail::read_if(j, "r_min", c.r_min);
  detail::read_if(j, "coverage_target", c.coverage_target);
  detail::read_if(j, "max_isocenters", c.max_isocenters);
}

inline void to_json(json& j, const DatasetConfig& c) {
  j = {{"spheres", c.spheres}, {"packed", c.packed}, {"tumors", c.tumors}, {"pack", c.pack},
       {"mm3_per_voxel", c.mm3_per_voxel}};
}
inline void from_json(const json& j, DatasetConfig& c) {
  detail::read_if(j, "spheres", c.spheres);
  detail::read_if(j, "packed", c.packed);
  detail::read_if(j, "tumors", c.tumors);
  detail::read_if(j, "pack", c.pack);
  detail::read_if(j, "mm3_per_voxel", c.mm3_per_voxel);
}

inline void to_json(json& j, const ManifestSample& s) {
  j = {{"index", s.index}, {"seed", detail::opt_to_json(s.seed)}};
  if (s.shape) j["shape"] = *s.shape;
  if (s.isocenters) j["isocenters"] = *s.isocenters;
  if (s.stop) j["stop_cause"] = *s.stop;
  if (s.covered_fraction) j["covered_fraction"] = *s.covered_fraction;
}
inline void from_json(const json& j, ManifestSample& s) {
  s.index = detail::require(j, "index").get<std::uint64_t>();
  s.seed = detail::opt_from_json<std::uint64_t>(j, "seed");
  s.shape = detail::opt_from_json<ShapeSpec>(j, "shape");
  s.isocenters = detail::opt_from_json<IsocenterSet>(j, "isocenters");
  s.stop = detail::opt_from_json<PackStop>(j, "stop_cause");
  s.covered_fraction = detail::opt_from_json<double>(j, "covered_fraction");
}

inline void to_json(json& j, const Manifest& m) {
  j = {{"format", kManifestFormat},
       {"version", kJsonVersion},
       {"kind", detail::opt_to_json(m.kind)},
       {"count", m.count},
       {"base_seed", detail::opt_to_json(m.base_seed)},
       {"dims", m.dims},
       {"channels", m.channels},
       {"mm3_per_voxel", m.config.mm3_per_voxel},
       {"config", m.config},
       {"samples", m.samples}};
}
inline void from_json(const json& j, Manifest& m) {
  if (detail::require(j, "format").get<std::string>() != kManifestFormat)
    throw ParseError("not a dataset manifest", 0);
  m.kind = detail::opt_from_json<DatasetKind>(j, "kind");
  m.count = detail::require(j, "count").get<std::uint64_t>();
  m.base_seed = detail::opt_from_json<std::uint64_t>(j, "base_seed");
  m.dims = detail::require(j, "dims").get<Dims>();
  m.channels = detail::require(j, "channels").get<int>();
  detail::read_if(j, "config", m.config);
  detail::read_if(j, "mm3_per_voxel", m.config.mm3_per_voxel);
  m.samples = detail::require(j, "samples").get<std::vector<ManifestSample>>();
  if (m.samples.size() != m.count) throw ParseError("manifest sample list does not match its count", 0);
}

inline void to_json(json& j, const Thresholds& t) { j = {{"connectivity", t.connectivity}, {"convexity", t.convexity}}; }
inline void from_json(const json& j, Thresholds& t) {
  detail::read_if(j, "connectivity", t.connectivity);
  detail::read_if(j, "convexity", t.convexity);
}

inline void to_json(json& j, const EvalConfig& c) {
  j = {{"thresholds", c.thresholds},
       {"subsphere_thresholds", c.subsphere_thresholds},
       {"bins", c.bins},
       {"eps", c.eps},
       {"connectivity", c.connectivity},
       {"location_metrics", c.location_metrics}};
}
inline void from_json(const json& j, EvalConfig& c) {
  detail::read_if(j, "thresholds", c.thresholds);
  detail::read_if(j, "subsphere_thresholds", c.subsphere_thresholds);
  detail::read_if(j, "bins", c.bins);
  detail::read_if(j, "eps", c.eps);
  detail::read_if(j, "connectivity", c.connectivity);
  detail::read_if(j, "location_metrics", c.location_metrics);
}

inline void to_json(json& j, const SampleMetrics& m) {
  j = {{"volume_size", m.volume_size},
       {"component_count", m.component_count},
       {"connectivity_ratio", detail::opt_to_json(m.connectivity_ratio)},
       {"convexity_ratio", detail::opt_to_json(m.convexity_ratio)},
       {"omega1", m.moments ? json(m.moments->omega1) : json(nullptr)},
       {"omega2", m.moments ? json(m.moments->omega2) : json(nullptr)},
       {"omega3", m.moments ? json(m.moments->omega3) : json(nullptr)},
       {"shannon_equitability", detail::opt_to_json(m.shannon_equitability)},
       {"subsphere_coverage", detail::opt_to_json(m.subsphere_coverage)},
       {"connected_subspheres_fraction", detail::opt_to_json(m.connected_subspheres_fraction)},
       {"fd_error", detail::opt_to_json(m.fd_error)},
       {"ratio_mae", detail::opt_to_json(m.ratio_mae)},
       {"target_distance_error", detail::opt_to_json(m.target_distance_error)},
       {"passes", m.passes}};
}
inline void from_json(const json& j, SampleMetrics& m) {
  m.volume_size = detail::require(j, "volume_size").get<std::size_t>();
  m.component_count = detail::require(j, "component_count").get<std::size_t>();
  m.connectivity_ratio = detail::opt_from_json<double>(j, "connectivity_ratio");
  m.convexity_ratio = detail::opt_from_json<double>(j, "convexity_ratio");
  const auto o1 = detail::opt_from_json<double>(j, "omega1");
  const auto o2 = detail::opt_from_json<double>(j, "omega2");
  const auto o3 = detail::opt_from_json<double>(j, "omega3");
  if (o1 && o2 && o3) m.moments = MomentInvariants{*o1, *o2, *o3};
  m.shannon_equitability = detail::opt_from_json<double>(j, "shannon_equitability");
  m.subsphere_coverage = detail::opt_from_json<double>(j, "subsphere_coverage");
  m.connected_subspheres_fraction = detail::opt_from_json<double>(j, "connected_subspheres_fraction");
  m.fd_error = detail::opt_from_json<double>(j, "fd_error");
  m.ratio_mae = detail::opt_from_json<double>(j, "ratio_mae");
  m.target_distance_error = detail::opt_from_json<double>(j, "target_distance_error");
  m.passes = detail::require(j, "passes").get<bool>();
}

inline void to_json(json& j, const Aggregate& a) { j = {{"count", a.count}, {"mean", a.mean}, {"std", a.std}}; }
inline void from_json(const json& j, Aggregate& a) {
  a.count = detail::require(j, "count").get<std::size_t>();
  a.mean = detail::require(j, "mean").get<double>();
  a.std = detail::require(j, "std").get<double>();
}

inline void to_json(json& j, const CorpusSummary& s) {
  j = {{"sample_count", s.sample_count},
       {"coverage_ratio", s.coverage_ratio},
       {"aggregates", s.aggregates},
       {"samples", s.samples}};
}
inline void from_json(const json& j, CorpusSummary& s) {
  s.sample_count = detail::require(j, "sample_count").get<std::size_t>();
  s.coverage_ratio = detail::require(j, "coverage_ratio").get<double>();
  s.aggregates = detail::require(j, "aggregates").get<std::map<std::string, Aggregate>>();
  s.samples = detail::require(j, "samples").get<std::vector<SampleMetrics>>();
}

inline void to_json(json& j, const MetricsReport& r) {
  json kl = json::object();
  for (const auto& [name, v] : r.kl) kl[name] = detail::opt_to_json(v);
  j = {{"format", kReportFormat},
       {"version", kJsonVersion},
       {"dims", r.dims},
       {"channels", r.channels},
       {"config", r.config},
       {"coverage_ratio", r.coverage_ratio},
       {"kl", kl},
       {"real", r.real},
       {"generated", r.generated}};
}
inline void from_json(const json& j, MetricsReport& r) {
  if (detail::require(j, "format").get<std::string>() != kReportFormat) throw ParseError("not a metrics report", 0);
  r.dims = detail::require(j, "dims").get<Dims>();
  r.channels = detail::require(j, "channels").get<int>();
  r.config = detail::require(j, "config").get<EvalConfig>();
  r.coverage_ratio = detail::require(j, "coverage_ratio").get<double>();
  r.kl.clear();
  for (const auto& [name, v] : detail::require(j, "kl").items())
    r.kl[name] = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
  r.real = detail::require(j, "real").get<CorpusSummary>();
  r.generated = detail::require(j, "generated").get<CorpusSummary>();
}

inline json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

template <class T>
T load_json_as(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

/// One CSV row per bin: bin_left,bin_right,p_real,p_generated.
inline std::string histogram_csv(const HistogramPair& h) {
  std::ostringstream os;
  os << "bin_left,bin_right,p_real,p_generated\n" << std::setprecision(17);
  for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
    os << h.edges[b] << ',' << h.edges[b + 1] << ',' << h.p_real[b] << ',' << h.p_generated[b] << '\n';
  return os.str();
}

}  // namespace vox3d
