#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "vox3d/dataset_io.hpp"
#include "vox3d/shapegen.hpp"

namespace vox3d {

/// The four synthetic datasets.
enum class DatasetKind { Spheres, SpheresPacked, Tumors, TumorsPacked };

inline const char* to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::Spheres: return "spheres";
    case DatasetKind::SpheresPacked: return "spheres-packed";
    case DatasetKind::Tumors: return "tumors";
    case DatasetKind::TumorsPacked: return "tumors-packed";
  }
  return "?";
}

inline DatasetKind dataset_kind_from_string(const std::string& s) {
  for (auto k : {DatasetKind::Spheres, DatasetKind::SpheresPacked, DatasetKind::Tumors, DatasetKind::TumorsPacked})
    if (s == to_string(k)) return k;
  throw InvalidConfigError("unknown dataset kind '" + s + "' (spheres, spheres-packed, tumors, tumors-packed)");
}

inline int dataset_channels(DatasetKind k) {
  return (k == DatasetKind::SpheresPacked || k == DatasetKind::TumorsPacked) ? 2 : 1;
}

struct DatasetConfig {
  VolumeConfig spheres;
  PackedConfig packed;
  TumorConfig tumors;
  PackConfig pack;
  /// Physical voxel volume, carried as metadata only.
  double mm3_per_voxel = 2.0;

  Dims dims(DatasetKind k) const {
    switch (k) {
      case DatasetKind::Spheres: return spheres.dims;
      case DatasetKind::SpheresPacked: return packed.volume.dims;
      default: return tumors.dims;
    }
  }
};

struct ManifestSample {
  std::uint64_t index = 0;
  /// Generation seed; absent for samples packed from an existing dataset.
  std::optional<std::uint64_t> seed;
  std::optional<ShapeSpec> shape;
  /// Ground-truth isocenters (packed kinds), rounded to 6 decimals.
  std::optional<IsocenterSet> isocenters;
  std::optional<PackStop> stop;
  std::optional<double> covered_fraction;
};

struct Manifest {
  /// Absent when the dataset was produced by packing an existing file.
  std::optional<DatasetKind> kind;
  std::uint64_t count = 0;
  std::optional<std::uint64_t> base_seed;
  Dims dims;
  int channels = 1;
  DatasetConfig config;
  std::vector<ManifestSample> samples;
};

inline double round6(double v) { return std::round(v * 1e6) / 1e6; }

inline IsocenterSet rounded(const IsocenterSet& s) {
  IsocenterSet out;
  for (const auto& i : s.isocenters)
    out.isocenters.push_back({{round6(i.center.x), round6(i.center.y), round6(i.center.z)}, round6(i.radius), {}, {}});
  return out;
}

struct GeneratedSample {
  VoxelGrid grid;
  ManifestSample record;
};

/// Runs grassfire packing on channel 0 of a 1-channel volume and returns the
/// 2-channel grid whose channel 1 holds the sphere-filled coverage.
inline std::pair<VoxelGrid, PackResult> pack_volume(const VoxelGrid& volume, const PackConfig& cfg) {
  if (volume.channels() != 1)
    throw AlreadyPackedError("input already has " + std::to_string(volume.channels()) + " channels");
  PackResult res = pack_isocenters(volume, cfg, 0);
  VoxelGrid out = volume.with_added_channel();
  const auto cov = res.covered.channel_data(0);
  auto ch1 = out.channel_data(1);
  std::copy(cov.begin(), cov.end(), ch1.begin());
  return {std::move(out), std::move(res)};
}

/// Sample generated with a given seed. Pure function of (kind, config, seed).
inline GeneratedSample generate_sample(DatasetKind kind, const DatasetConfig& cfg, std::uint64_t seed) {
  GeneratedSample s;
  s.record.seed = seed;
  switch (kind) {
    case DatasetKind::Spheres: {
      ShapeSpec spec;
      s.grid = gen_connected_volume(cfg.spheres, seed, &spec);
      s.record.shape = spec;
      break;
    }
    case DatasetKind::SpheresPacked: {
      ShapeSpec spec;
      PackedVolume pv = gen_packed_volume(cfg.packed, seed, &spec);
      s.grid = std::move(pv.grid);
      s.record.shape = spec;
      s.record.isocenters = rounded(pv.isocenters);
      break;
    }
    case DatasetKind::Tumors: s.grid = gen_tumor_volume(cfg.tumors, seed); break;
    case DatasetKind::TumorsPacked: {
      auto [grid, res] = pack_volume(gen_tumor_volume(cfg.tumors, seed), cfg.pack);
      s.grid = std::move(grid);
      s.record.isocenters = rounded(res.isocenters);
      s.record.stop = res.stop;
      s.record.covered_fraction = res.covered_fraction;
      break;
    }
  }
  return s;
}

/// Generates `count` samples (sample i uses seed base_seed + i), streams them
/// to `sink` in the voxel file format and returns the manifest.
inline Manifest gen_dataset(DatasetKind kind, std::uint64_t count, std::uint64_t base_seed, const DatasetConfig& cfg,
                            std::ostream& sink) {
  if (count < 1) throw InvalidConfigError("dataset count must be >= 1");
  Manifest m{kind, count, base_seed, cfg.dims(kind), dataset_channels(kind), cfg, {}};
  m.samples.reserve(std::size_t(count));
  DatasetWriter writer(sink, m.dims, m.channels, count);
  for (std::uint64_t i = 0; i < count; ++i) {
    GeneratedSample s = generate_sample(kind, cfg, base_seed + i);
    s.record.index = i;
    writer.write(s.grid);
    m.samples.push_back(std::move(s.record));
  }
  writer.finish();
  return m;
}

}  // namespace vox3d
