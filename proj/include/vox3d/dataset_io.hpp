#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "vox3d/grid.hpp"

namespace vox3d {

// File layout (all integers little-endian):
//   0  magic        "VXG1"
//   4  version      u16
//   6  channels     u16
//   8  dx, dy, dz   u16 each
//  14  sample_count u64
//  22  samples, each channels * dx * dy * dz bytes (0 or 1),
//      channel-major, then x, y, z with z fastest.

inline constexpr std::array<char, 4> kVoxelMagic{'V', 'X', 'G', '1'};
inline constexpr std::uint16_t kVoxelFormatVersion = 1;
inline constexpr std::size_t kVoxelHeaderSize = 22;

struct VoxelFileHeader {
  std::uint16_t version = kVoxelFormatVersion;
  std::uint16_t channels = 1;
  Dims dims{16, 16, 16};
  std::uint64_t sample_count = 0;

  std::uint64_t sample_bytes() const { return std::uint64_t(channels) * dims.volume(); }
  std::uint64_t sample_offset(std::uint64_t i) const { return kVoxelHeaderSize + i * sample_bytes(); }
  std::uint64_t file_size() const { return sample_offset(sample_count); }
  friend bool operator==(const VoxelFileHeader&, const VoxelFileHeader&) = default;
};

namespace detail {

inline void put_le(std::uint8_t* out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out[i] = std::uint8_t(v >> (8 * i));
}

inline std::uint64_t get_le(const std::uint8_t* in, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t(in[i]) << (8 * i);
  return v;
}

}  // namespace detail

inline std::array<std::uint8_t, kVoxelHeaderSize> encode_header(const VoxelFileHeader& h) {
  std::array<std::uint8_t, kVoxelHeaderSize> b{};
  std::memcpy(b.data(), kVoxelMagic.data(), 4);
  detail::put_le(b.data() + 4, h.version, 2);
  detail::put_le(b.data() + 6, h.channels, 2);
  detail::put_le(b.data() + 8, std::uint64_t(h.dims.x), 2);
  detail::put_le(b.data() + 10, std::uint64_t(h.dims.y), 2);
  detail::put_le(b.data() + 12, std::uint64_t(h.dims.z), 2);
  detail::put_le(b.data() + 14, h.sample_count, 8);
  return b;
}

/// Parses and validates the fixed header. `available` is the number of bytes
/// the source holds in total, used to reject short or overlong files.
inline VoxelFileHeader decode_header(std::span<const std::uint8_t> bytes, std::optional<std::uint64_t> available) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kVoxelMagic.data(), 4) != 0)
    throw BadMagicError("bad magic (expected \"VXG1\")", 0);
  if (bytes.size() < kVoxelHeaderSize)
    throw TruncatedError(bytes.size(), kVoxelHeaderSize, bytes.size());
  VoxelFileHeader h;
  h.version = std::uint16_t(detail::get_le(bytes.data() + 4, 2));
  if (h.version != kVoxelFormatVersion)
    throw ParseError("unsupported format version " + std::to_string(h.version), 4);
  h.channels = std::uint16_t(detail::get_le(bytes.data() + 6, 2));
  if (h.channels == 0) throw ParseError("channel count must be >= 1", 6);
  for (int k = 0; k < 3; ++k) {
    const auto v = int(detail::get_le(bytes.data() + 8 + 2 * k, 2));
    if (v == 0) throw ParseError("grid dimension must be >= 1", std::uint64_t(8 + 2 * k));
    (k == 0 ? h.dims.x : k == 1 ? h.dims.y : h.dims.z) = v;
  }
  h.sample_count = detail::get_le(bytes.data() + 14, 8);
  if (available) {
    if (*available < h.file_size()) throw TruncatedError(*available, h.file_size(), *available);
    if (*available > h.file_size())
      throw ParseError("trailing data: file holds " + std::to_string(*available) + " bytes, header declares " +
                           std::to_string(h.file_size()),
                       h.file_size());
  }
  return h;
}

/// Streams samples of one shape to a sink; the sample count is fixed up front.
class DatasetWriter {
 public:
  DatasetWriter(std::ostream& out, Dims dims, int channels, std::uint64_t sample_count) : out_(out) {
    if (channels < 1 || channels > 0xffff) throw InvalidInputError("channel count out of range");
    if (dims.x > 0xffff || dims.y > 0xffff || dims.z > 0xffff) throw InvalidInputError("grid dims exceed 65535");
    header_ = {kVoxelFormatVersion, std::uint16_t(channels), dims, sample_count};
    const auto h = encode_header(header_);
    put(h.data(), h.size());
  }

  void write(const VoxelGrid& g) {
    if (g.dims() != header_.dims || g.channels() != header_.channels)
      throw InvalidInputError("incompatible sample: expected " + to_string(header_.dims) + "/" +
                              std::to_string(header_.channels) + " channel(s), got " + to_string(g.dims()) + "/" +
                              std::to_string(g.channels()));
    if (written_ == header_.sample_count) throw InvalidInputError("more samples than declared in the header");
    const auto b = g.bytes();
    put(b.data(), b.size());
    ++written_;
  }

  /// Total bytes written. Throws if fewer samples than declared were written.
  std::uint64_t finish() {
    if (written_ != header_.sample_count)
      throw InvalidInputError("wrote " + std::to_string(written_) + " of " + std::to_string(header_.sample_count) +
                              " declared samples");
    out_.flush();
    if (!out_) throw IoError("flush failed");
    return bytes_;
  }

  const VoxelFileHeader& header() const { return header_; }

 private:
  void put(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), std::streamsize(n));
    if (!out_) throw IoError("write failed after " + std::to_string(bytes_) + " bytes");
    bytes_ += n;
  }

  std::ostream& out_;
  VoxelFileHeader header_;
  std::uint64_t written_ = 0;
  std::uint64_t bytes_ = 0;
};

/// Writes all samples; `dims`/`channels` describe the (possibly empty) set.
inline std::uint64_t write_dataset(std::span<const VoxelGrid> samples, std::ostream& out,
                                   std::optional<Dims> dims = std::nullopt,
                                   std::optional<int> channels = std::nullopt) {
  const Dims d = dims ? *dims : (samples.empty() ? Dims{} : samples.front().dims());
  const int c = channels ? *channels : (samples.empty() ? 1 : samples.front().channels());
  for (const auto& g : samples)
    if (g.dims() != d || g.channels() != c)
      throw InvalidInputError("incompatible samples: all samples must share dims and channels");
  DatasetWriter w(out, d, c, samples.size());
  for (const auto& g : samples) w.write(g);
  return w.finish();
}

inline std::uint64_t write_dataset_file(const std::filesystem::path& path, std::span<const VoxelGrid> samples,
                                        std::optional<Dims> dims = std::nullopt,
                                        std::optional<int> channels = std::nullopt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return write_dataset(samples, out, dims, channels);
}

/// Half-open sample index range [begin, end).
struct SampleRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
};

/// Random-access reader over a seekable stream.
class DatasetReader {
 public:
  explicit DatasetReader(std::istream& in) : in_(in) {
    in_.seekg(0, std::ios::end);
    const auto end = in_.tellg();
    if (end < 0) throw IoError("dataset source is not seekable");
    size_ = std::uint64_t(end);
    in_.seekg(0);
    std::vector<std::uint8_t> head(std::size_t(std::min<std::uint64_t>(size_, kVoxelHeaderSize)));
    in_.read(reinterpret_cast<char*>(head.data()), std::streamsize(head.size()));
    if (!in_) throw IoError("read failed in header");
    header_ = decode_header(head, size_);
  }

  const VoxelFileHeader& header() const { return header_; }
  std::uint64_t size() const { return header_.sample_count; }

  VoxelGrid read(std::uint64_t index) {
    if (index >= header_.sample_count)
      throw InvalidInputError("sample " + std::to_string(index) + " out of range (file has " +
                              std::to_string(header_.sample_count) + ")");
    VoxelGrid g(header_.dims, header_.channels);
    auto bytes = g.mutable_bytes();
    const std::uint64_t off = header_.sample_offset(index);
    in_.seekg(std::streamoff(off));
    in_.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!in_) throw TruncatedError(off, header_.sample_bytes(), std::uint64_t(in_.gcount()));
    for (std::size_t i = 0; i < bytes.size(); ++i)
      if (bytes[i] > 1)
        throw BadVoxelError("voxel byte " + std::to_string(bytes[i]) + " is not 0 or 1", off + i);
    return g;
  }

  std::vector<VoxelGrid> read(std::optional<SampleRange> range = std::nullopt) {
    const SampleRange r = range ? *range : SampleRange{0, header_.sample_count};
    if (r.begin > r.end || r.end > header_.sample_count)
      throw InvalidInputError("sample range [" + std::to_string(r.begin) + ", " + std::to_string(r.end) +
                              ") outside [0, " + std::to_string(header_.sample_count) + ")");
    std::vector<VoxelGrid> out;
    out.reserve(std::size_t(r.end - r.begin));
    for (std::uint64_t i = r.begin; i < r.end; ++i) out.push_back(read(i));
    return out;
  }

 private:
  std::istream& in_;
  std::uint64_t size_ = 0;
  VoxelFileHeader header_;
};

inline std::vector<VoxelGrid> read_dataset(std::istream& in, std::optional<SampleRange> range = std::nullopt) {
  DatasetReader reader(in);
  return reader.read(range);
}

inline std::vector<VoxelGrid> read_dataset_file(const std::filesystem::path& path,
                                                std::optional<SampleRange> range = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_dataset(in, range);
}

inline VoxelFileHeader read_header_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return DatasetReader(in).header();
}

}  // namespace vox3d
