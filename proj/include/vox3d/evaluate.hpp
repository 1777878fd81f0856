#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vox3d/metrics.hpp"

namespace vox3d {

struct EvalConfig {
  Thresholds thresholds;
  /// Thresholds applied to each subsphere component individually.
  Thresholds subsphere_thresholds;
  int bins = 32;
  double eps = 1e-10;
  Connectivity connectivity = Connectivity::Vertex;
  /// FD error, ratio MAE and target distance error (sphere/ellipsoid packed data).
  bool location_metrics = false;
};

struct SampleMetrics {
  std::size_t volume_size = 0;
  std::size_t component_count = 0;
  std::optional<double> connectivity_ratio;
  std::optional<double> convexity_ratio;
  std::optional<MomentInvariants> moments;
  std::optional<double> shannon_equitability;
  std::optional<double> subsphere_coverage;
  std::optional<double> connected_subspheres_fraction;
  std::optional<double> fd_error;
  std::optional<double> ratio_mae;
  std::optional<double> target_distance_error;
  bool passes = false;

  friend bool operator==(const SampleMetrics&, const SampleMetrics&) = default;
};

struct Aggregate {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;
  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct CorpusSummary {
  std::size_t sample_count = 0;
  double coverage_ratio = 0.0;
  std::map<std::string, Aggregate> aggregates;
  std::vector<SampleMetrics> samples;
  friend bool operator==(const CorpusSummary&, const CorpusSummary&) = default;
};

struct MetricsReport {
  Dims dims;
  int channels = 1;
  EvalConfig config;
  CorpusSummary real;
  CorpusSummary generated;
  /// KL(real || generated) per metric; empty when either side has no defined values.
  std::map<std::string, std::optional<double>> kl;
  double coverage_ratio = 0.0;
};

using MetricAccessor = std::function<std::optional<double>(const SampleMetrics&)>;

/// Aggregated metrics in report order.
inline const std::vector<std::pair<std::string, MetricAccessor>>& metric_table() {
  static const std::vector<std::pair<std::string, MetricAccessor>> table = {
      {"volume_size", [](const SampleMetrics& m) { return std::optional<double>(double(m.volume_size)); }},
      {"component_count", [](const SampleMetrics& m) { return std::optional<double>(double(m.component_count)); }},
      {"connectivity_ratio", [](const SampleMetrics& m) { return m.connectivity_ratio; }},
      {"convexity_ratio", [](const SampleMetrics& m) { return m.convexity_ratio; }},
      {"omega1", [](const SampleMetrics& m) { return m.moments ? std::optional(m.moments->omega1) : std::nullopt; }},
      {"omega2", [](const SampleMetrics& m) { return m.moments ? std::optional(m.moments->omega2) : std::nullopt; }},
      {"omega3", [](const SampleMetrics& m) { return m.moments ? std::optional(m.moments->omega3) : std::nullopt; }},
      {"shannon_equitability", [](const SampleMetrics& m) { return m.shannon_equitability; }},
      {"subsphere_coverage", [](const SampleMetrics& m) { return m.subsphere_coverage; }},
      {"connected_subspheres_fraction", [](const SampleMetrics& m) { return m.connected_subspheres_fraction; }},
      {"fd_error", [](const SampleMetrics& m) { return m.fd_error; }},
      {"ratio_mae", [](const SampleMetrics& m) { return m.ratio_mae; }},
      {"target_distance_error", [](const SampleMetrics& m) { return m.target_distance_error; }},
  };
  return table;
}

/// Metrics whose real-vs-generated distributions are compared by KL.
inline std::vector<std::string> kl_metrics(int channels) {
  std::vector<std::string> out{"volume_size", "connectivity_ratio", "convexity_ratio"};
  if (channels >= 2) out.push_back("shannon_equitability");
  return out;
}

inline const MetricAccessor& metric_accessor(const std::string& name) {
  for (const auto& [n, f] : metric_table())
    if (n == name) return f;
  throw InvalidInputError("unknown metric " + name);
}

namespace detail {

template <class F>
auto defined_or_empty(F&& f) -> std::optional<decltype(f())> {
  try {
    return f();
  } catch (const UndefinedMetricError&) {
    return std::nullopt;
  } catch (const EmptyInputError&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline SampleMetrics evaluate_sample(const VoxelGrid& grid, const EvalConfig& cfg) {
  SampleMetrics m;
  const auto fg = grid.foreground(0);
  m.volume_size = fg.size();
  m.component_count = count_components(grid, 0, cfg.connectivity);
  if (!fg.empty()) {
    m.connectivity_ratio = connectivity_ratio(fg);
    m.convexity_ratio = convexity_ratio(fg);
    m.moments = moment_invariants(fg);
  }
  m.passes = passes({m.connectivity_ratio, m.convexity_ratio}, cfg.thresholds);

  if (grid.channels() >= 2) {
    const auto lab = label_components(grid, 1, cfg.connectivity);
    if (lab.count() > 0) {
      std::vector<double> sizes(lab.component_sizes.begin(), lab.component_sizes.end());
      m.shannon_equitability = shannon_equitability(sizes);
    }
    if (!fg.empty()) m.subsphere_coverage = subsphere_coverage(grid);
    m.connected_subspheres_fraction = connected_subspheres_fraction(grid, cfg.subsphere_thresholds, cfg.connectivity);

    if (cfg.location_metrics && !fg.empty()) {
      IsocenterSet gen = extract_isocenters(grid, 1, cfg.connectivity);
      const Point3 c = centroid(fg);
      const Radii radii = estimate_semi_axes(grid, 0);
      const IsocenterSet reference = canonical_isocenters(c, radii);
      m.fd_error = detail::defined_or_empty([&] { return fd_error(gen, reference); });
      if (!gen.empty()) {
        annotate_distances(gen, grid, 0);
        m.ratio_mae = detail::defined_or_empty([&] { return ratio_mae(gen); });
        m.target_distance_error = detail::defined_or_empty([&] {
          std::optional<std::size_t> center;
          if (gen.size() >= 3) center = nearest_isocenter(gen, c);
          return target_distance_error(gen, radii, center);
        });
      }
    }
  }
  return m;
}

inline std::vector<double> metric_values(const CorpusSummary& s, const std::string& name) {
  const auto& f = metric_accessor(name);
  std::vector<double> out;
  for (const auto& m : s.samples)
    if (auto v = f(m)) out.push_back(*v);
  return out;
}

inline CorpusSummary summarize(std::span<const VoxelGrid> corpus, const EvalConfig& cfg) {
  CorpusSummary s;
  s.sample_count = corpus.size();
  s.samples.reserve(corpus.size());
  std::size_t ok = 0;
  for (const auto& g : corpus) {
    s.samples.push_back(evaluate_sample(g, cfg));
    ok += s.samples.back().passes;
  }
  s.coverage_ratio = corpus.empty() ? 0.0 : double(ok) / double(corpus.size());
  for (const auto& [name, f] : metric_table()) {
    const auto vals = metric_values(s, name);
    if (vals.empty()) continue;
    CompensatedSum sum;
    for (double v : vals) sum.add(v);
    const double mean = sum.value() / double(vals.size());
    CompensatedSum sq;
    for (double v : vals) sq.add((v - mean) * (v - mean));
    s.aggregates[name] = {vals.size(), mean, std::sqrt(sq.value() / double(vals.size()))};
  }
  return s;
}

/// Full report for a generated corpus against a real one.
inline MetricsReport evaluate_corpus(std::span<const VoxelGrid> real, std::span<const VoxelGrid> generated,
                                     const EvalConfig& cfg = {}) {
  if (real.empty() || generated.empty()) throw EmptyInputError("evaluation needs non-empty corpora");
  const Dims dims = real.front().dims();
  const int channels = real.front().channels();
  for (auto corpus : {real, generated})
    for (const auto& g : corpus)
      if (g.dims() != dims || g.channels() != channels)
        throw IncompatibleDatasetsError("datasets differ in dims or channels: expected " + to_string(dims) + "/" +
                                        std::to_string(channels) + " channel(s), got " + to_string(g.dims()) + "/" +
                                        std::to_string(g.channels()));
  MetricsReport r;
  r.dims = dims;
  r.channels = channels;
  r.config = cfg;
  r.real = summarize(real, cfg);
  r.generated = summarize(generated, cfg);
  r.coverage_ratio = r.generated.coverage_ratio;
  for (const auto& name : kl_metrics(channels)) {
    const auto a = metric_values(r.real, name);
    const auto b = metric_values(r.generated, name);
    r.kl[name] = (a.empty() || b.empty()) ? std::nullopt
                                          : std::optional<double>(kl_divergence_hist(a, b, cfg.bins, cfg.eps));
  }
  return r;
}

/// The histograms behind every defined KL entry, for CSV export.
inline std::map<std::string, HistogramPair> kl_histograms(const MetricsReport& r) {
  std::map<std::string, HistogramPair> out;
  for (const auto& [name, kl] : r.kl) {
    if (!kl) continue;
    const auto a = metric_values(r.real, name);
    const auto b = metric_values(r.generated, name);
    out[name] = histogram_pair(a, b, r.config.bins, r.config.eps);
  }
  return out;
}

}  // namespace vox3d
