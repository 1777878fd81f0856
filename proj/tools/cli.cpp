#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "vox3d/vox3d.hpp"

namespace vox3d::cli {

namespace {

namespace fs = std::filesystem;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string default_manifest_path(const std::string& data_path) { return data_path + ".manifest.json"; }

struct GenerateFlags {
  std::string kind;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string manifest;
  std::string config;
};

struct EvaluateFlags {
  std::string real;
  std::string gen;
  std::string report;
  std::string histograms;
  double tau_conn = Thresholds{}.connectivity;
  double tau_conv = Thresholds{}.convexity;
  int bins = 32;
  double eps = 1e-10;
  int connectivity = 26;
  bool location = false;
};

struct PackFlags {
  std::string in;
  std::string out;
  std::string manifest;
  double r_min = PackConfig{}.r_min;
  double coverage = PackConfig{}.coverage_target;
  int max_isocenters = PackConfig{}.max_isocenters;
};

struct ConnLossFlags {
  std::string in;
  std::string manifest;
  std::string expected = "1";
  double lambda3 = 1.0;
  std::size_t batch = 40;
  int connectivity = 26;
};

void print_pack_stats(const Manifest& m, std::ostream& out) {
  std::map<std::string, std::size_t> stops;
  std::size_t lo = SIZE_MAX, hi = 0, total = 0;
  for (const auto& s : m.samples) {
    if (s.stop) ++stops[to_string(*s.stop)];
    if (!s.isocenters) continue;
    lo = std::min(lo, s.isocenters->size());
    hi = std::max(hi, s.isocenters->size());
    total += s.isocenters->size();
  }
  if (hi == 0 && lo == SIZE_MAX) return;
  out << "isocenters: mean " << fixed6(double(total) / double(m.samples.size())) << ", min " << lo << ", max " << hi
      << '\n';
  for (const auto& [cause, n] : stops) out << "stop " << cause << ": " << n << '\n';
}

int cmd_generate(const GenerateFlags& f, std::ostream& out) {
  const DatasetKind kind = dataset_kind_from_string(f.kind);
  DatasetConfig cfg;
  if (!f.config.empty()) cfg = load_json_as<DatasetConfig>(f.config);
  std::ofstream data(f.out, std::ios::binary | std::ios::trunc);
  if (!data) throw IoError("cannot open " + f.out + " for writing");
  const Manifest m = gen_dataset(kind, f.count, f.seed, cfg, data);
  data.close();
  if (!data) throw IoError("write failed for " + f.out);
  const std::string manifest_path = f.manifest.empty() ? default_manifest_path(f.out) : f.manifest;
  write_json_file(manifest_path, json(m));

  out << "kind: " << to_string(kind) << '\n'
      << "count: " << m.count << '\n'
      << "base_seed: " << f.seed << '\n'
      << "dims: " << to_string(m.dims) << '\n'
      << "channels: " << m.channels << '\n'
      << "out: " << f.out << '\n'
      << "manifest: " << manifest_path << '\n';
  print_pack_stats(m, out);
  return kExitOk;
}

void print_report_table(const MetricsReport& r, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof line, "%-30s %26s %26s %12s\n", "metric", "real mean +/- std", "generated mean +/- std",
                "KL");
  out << line;
  auto cell = [](const CorpusSummary& s, const std::string& name) -> std::string {
    const auto it = s.aggregates.find(name);
    if (it == s.aggregates.end()) return "-";
    return fixed6(it->second.mean) + " +/- " + fixed6(it->second.std);
  };
  for (const auto& [name, f] : metric_table()) {
    if (!r.real.aggregates.count(name) && !r.generated.aggregates.count(name)) continue;
    std::string kl = "-";
    if (const auto it = r.kl.find(name); it != r.kl.end() && it->second) kl = fixed6(*it->second);
    std::snprintf(line, sizeof line, "%-30s %26s %26s %12s\n", name.c_str(), cell(r.real, name).c_str(),
                  cell(r.generated, name).c_str(), kl.c_str());
    out << line;
  }
  out << "coverage_ratio: real " << fixed6(r.real.coverage_ratio) << ", generated " << fixed6(r.coverage_ratio)
      << '\n';
}

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out) {
  EvalConfig cfg;
  cfg.thresholds = {f.tau_conn, f.tau_conv};
  cfg.bins = f.bins;
  cfg.eps = f.eps;
  cfg.connectivity = connectivity_from_int(f.connectivity);
  cfg.location_metrics = f.location;
  if (cfg.bins < 1) throw InvalidConfigError("--bins must be >= 1");
  if (!(cfg.eps > 0.0)) throw InvalidConfigError("--eps must be > 0");

  const auto real = read_dataset_file(f.real);
  const auto gen = read_dataset_file(f.gen);
  const MetricsReport report = evaluate_corpus(real, gen, cfg);
  print_report_table(report, out);
  if (!f.report.empty()) {
    write_json_file(f.report, json(report));
    out << "report: " << f.report << '\n';
  }
  if (!f.histograms.empty()) {
    fs::create_directories(f.histograms);
    for (const auto& [name, h] : kl_histograms(report)) {
      const fs::path p = fs::path(f.histograms) / (name + ".csv");
      std::ofstream csv(p, std::ios::trunc);
      csv << histogram_csv(h);
      if (!csv) throw IoError("write failed for " + p.string());
    }
    out << "histograms: " << f.histograms << '\n';
  }
  return kExitOk;
}

int cmd_pack(const PackFlags& f, std::ostream& out) {
  PackConfig cfg{f.r_min, f.coverage, f.max_isocenters};
  cfg.validate();
  const auto input = read_dataset_file(f.in);
  if (input.empty()) throw EmptyInputError("input dataset " + f.in + " holds no samples");
  if (input.front().channels() != 1)
    throw AlreadyPackedError(f.in + " already has " + std::to_string(input.front().channels()) + " channels");

  Manifest m;
  m.count = input.size();
  m.dims = input.front().dims();
  m.channels = 2;
  m.config.pack = cfg;
  std::ofstream data(f.out, std::ios::binary | std::ios::trunc);
  if (!data) throw IoError("cannot open " + f.out + " for writing");
  DatasetWriter writer(data, m.dims, 2, input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    auto [grid, res] = pack_volume(input[i], cfg);
    writer.write(grid);
    ManifestSample s;
    s.index = i;
    s.isocenters = rounded(res.isocenters);
    s.stop = res.stop;
    s.covered_fraction = res.covered_fraction;
    m.samples.push_back(std::move(s));
  }
  writer.finish();
  const std::string manifest_path = f.manifest.empty() ? default_manifest_path(f.out) : f.manifest;
  write_json_file(manifest_path, json(m));

  out << "count: " << m.count << '\n'
      << "out: " << f.out << '\n'
      << "manifest: " << manifest_path << '\n';
  print_pack_stats(m, out);
  return kExitOk;
}

int cmd_connloss(const ConnLossFlags& f, std::ostream& out) {
  if (f.batch < 1) throw InvalidConfigError("--batch must be >= 1");
  if (!(f.lambda3 >= 0.0)) throw InvalidConfigError("--lambda3 must be >= 0");
  std::optional<std::size_t> expected;  // empty: per-sample K from the manifest
  if (f.expected != "manifest") {
    std::size_t pos = 0;
    long long k = -1;
    try {
      k = std::stoll(f.expected, &pos);
    } catch (const std::exception&) {
    }
    if (k < 1 || pos != f.expected.size())
      throw InvalidConfigError("--expected-objects must be a positive integer or 'manifest', got '" + f.expected + "'");
    expected = std::size_t(k);
  }
  const bool multi = !expected || *expected >= 2;
  if (multi && f.manifest.empty())
    throw MissingGroundTruthError("--expected-objects " + f.expected + " needs --manifest with ground-truth isocenters");

  const Connectivity conn = connectivity_from_int(f.connectivity);
  const auto data = read_dataset_file(f.in);
  if (data.empty()) throw EmptyInputError("input dataset " + f.in + " holds no samples");

  std::optional<Manifest> manifest;
  if (multi) {
    manifest = load_json_as<Manifest>(f.manifest);
    if (manifest->samples.size() != data.size())
      throw InvalidInputError("manifest lists " + std::to_string(manifest->samples.size()) + " samples, dataset has " +
                              std::to_string(data.size()));
  }

  std::vector<ComponentCounts> counts;
  counts.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!multi) {
      counts.push_back(component_counts_for_loss(data[i], nullptr, conn));
      continue;
    }
    const auto& gt = manifest->samples[i].isocenters;
    if (!gt || gt->empty())
      throw MissingGroundTruthError("manifest sample " + std::to_string(i) + " has no ground-truth isocenters");
    if (expected && gt->size() != *expected)
      throw InvalidInputError("manifest sample " + std::to_string(i) + " has " + std::to_string(gt->size()) +
                              " isocenters, expected " + std::to_string(*expected));
    counts.push_back(component_counts_for_loss(data[i], &*gt, conn));
  }

  double total = 0.0;
  for (std::size_t b = 0, start = 0; start < counts.size(); ++b, start += f.batch) {
    const std::size_t end = std::min(counts.size(), start + f.batch);
    ConnLossInput batch{{counts.begin() + std::ptrdiff_t(start), counts.begin() + std::ptrdiff_t(end)}, f.lambda3};
    const double loss = connection_loss(batch);
    total += loss * double(end - start);
    out << "batch " << b << " [" << start << ", " << end << "): " << fixed6(loss) << '\n';
  }
  out << "overall: " << fixed6(total / double(counts.size())) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic connected-volume datasets, shape metrics and connection loss", "vox3d"};
  app.require_subcommand(1);

  GenerateFlags gf;
  auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset and its manifest");
  gen->add_option("--kind", gf.kind, "spheres | spheres-packed | tumors | tumors-packed")->required();
  gen->add_option("--count", gf.count, "Number of samples")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gf.seed, "Base seed; sample i uses seed + i")->required();
  gen->add_option("--out", gf.out, "Output dataset file")->required();
  gen->add_option("--manifest", gf.manifest, "Manifest path (default: <out>.manifest.json)");
  gen->add_option("--config", gf.config, "JSON generator configuration overrides");

  EvaluateFlags ef;
  auto* ev = app.add_subcommand("evaluate", "Score a generated dataset against a real one");
  ev->add_option("--real", ef.real, "Reference dataset")->required();
  ev->add_option("--gen", ef.gen, "Generated dataset")->required();
  ev->add_option("--report", ef.report, "Write the JSON report here");
  ev->add_option("--histograms", ef.histograms, "Write KL histogram CSVs into this directory");
  ev->add_option("--tau-conn", ef.tau_conn, "Connectivity-ratio threshold")->capture_default_str();
  ev->add_option("--tau-conv", ef.tau_conv, "Convexity-ratio threshold")->capture_default_str();
  ev->add_option("--bins", ef.bins, "KL histogram bins")->capture_default_str();
  ev->add_option("--eps", ef.eps, "KL smoothing")->capture_default_str();
  ev->add_option("--connectivity", ef.connectivity, "6, 18 or 26")->capture_default_str();
  ev->add_flag("--location", ef.location, "Also compute FD error, ratio MAE and target distance error");

  PackFlags pf;
  auto* pk = app.add_subcommand("pack", "Grassfire-pack every sample of a 1-channel dataset");
  pk->add_option("--in", pf.in, "Input 1-channel dataset")->required();
  pk->add_option("--out", pf.out, "Output 2-channel dataset")->required();
  pk->add_option("--manifest", pf.manifest, "Manifest path (default: <out>.manifest.json)");
  pk->add_option("--rmin", pf.r_min, "Smallest accepted sphere radius")->capture_default_str();
  pk->add_option("--coverage", pf.coverage, "Target covered fraction")->capture_default_str();
  pk->add_option("--max", pf.max_isocenters, "Maximum isocenters per sample")->capture_default_str();

  ConnLossFlags cf;
  auto* cl = app.add_subcommand("connloss", "Connection loss of a dataset, per batch and overall");
  cl->add_option("--in", cf.in, "Input dataset")->required();
  cl->add_option("--manifest", cf.manifest, "Manifest with ground-truth isocenters");
  cl->add_option("--expected-objects", cf.expected, "1, K >= 2, or 'manifest'")->capture_default_str();
  cl->add_option("--lambda3", cf.lambda3, "Weight of the connected-object reward")->capture_default_str();
  cl->add_option("--batch", cf.batch, "Samples per batch")->capture_default_str();
  cl->add_option("--connectivity", cf.connectivity, "6, 18 or 26")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(gf, out);
    if (*ev) return cmd_evaluate(ef, out);
    if (*pk) return cmd_pack(pf, out);
    if (*cl) return cmd_connloss(cf, out);
  } catch (const InvalidConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace vox3d::cli
