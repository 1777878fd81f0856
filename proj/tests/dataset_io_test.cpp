#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "vox3d/dataset_io.hpp"
#include "vox3d/random.hpp"

using namespace vox3d;

namespace {

std::vector<VoxelGrid> random_samples(std::size_t n, Dims d, int channels, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<VoxelGrid> out;
  for (std::size_t i = 0; i < n; ++i) {
    VoxelGrid g(d, channels);
    for (int c = 0; c < channels; ++c)
      for (auto& b : g.channel_data(c)) b = rng.bernoulli(0.3);
    out.push_back(std::move(g));
  }
  return out;
}

std::string encode(const std::vector<VoxelGrid>& samples) {
  std::ostringstream os;
  write_dataset(samples, os);
  return os.str();
}

}  // namespace

TEST(DatasetIo, SingleSampleByteCount) {
  const auto samples = random_samples(1, Dims{16, 16, 16}, 1, 1);
  std::ostringstream os;
  EXPECT_EQ(write_dataset(samples, os), 22u + 4096u);
  EXPECT_EQ(os.str().size(), 22u + 4096u);
}

TEST(DatasetIo, HeaderLayoutIsLittleEndian) {
  const auto samples = random_samples(3, Dims{2, 3, 4}, 2, 2);
  const std::string s = encode(samples);
  ASSERT_GE(s.size(), 22u);
  EXPECT_EQ(s.substr(0, 4), "VXG1");
  auto u16 = [&](std::size_t o) { return unsigned(std::uint8_t(s[o])) | unsigned(std::uint8_t(s[o + 1])) << 8; };
  EXPECT_EQ(u16(4), 1u);
  EXPECT_EQ(u16(6), 2u);
  EXPECT_EQ(u16(8), 2u);
  EXPECT_EQ(u16(10), 3u);
  EXPECT_EQ(u16(12), 4u);
  EXPECT_EQ(std::uint8_t(s[14]), 3u);
  for (int i = 15; i < 22; ++i) EXPECT_EQ(s[std::size_t(i)], 0);
  EXPECT_EQ(s.size(), 22u + 3u * 2u * 24u);
  // payload is the grids' own channel-major bytes
  const auto b = samples[1].bytes();
  EXPECT_EQ(s.substr(22 + 48, 48), std::string(b.begin(), b.end()));
}

TEST(DatasetIo, RoundTripIsExact) {
  for (int channels : {1, 2}) {
    const auto samples = random_samples(5, Dims{5, 6, 7}, channels, 3);
    std::stringstream ss(encode(samples));
    EXPECT_EQ(read_dataset(ss), samples);
  }
}

TEST(DatasetIo, RandomAccessAndRanges) {
  const auto samples = random_samples(6, Dims{4, 4, 4}, 1, 4);
  std::stringstream ss(encode(samples));
  DatasetReader reader(ss);
  EXPECT_EQ(reader.size(), 6u);
  EXPECT_EQ(reader.read(4), samples[4]);
  EXPECT_EQ(reader.read(1), samples[1]);
  const auto mid = reader.read(SampleRange{2, 5});
  ASSERT_EQ(mid.size(), 3u);
  EXPECT_EQ(mid[0], samples[2]);
  EXPECT_EQ(mid[2], samples[4]);
  EXPECT_THROW(reader.read(6), InvalidInputError);
  EXPECT_THROW(reader.read(SampleRange{4, 7}), InvalidInputError);
}

TEST(DatasetIo, EmptyDatasetRoundTrips) {
  std::ostringstream os;
  EXPECT_EQ(write_dataset({}, os, Dims{16, 16, 16}, 1), 22u);
  std::stringstream ss(os.str());
  EXPECT_TRUE(read_dataset(ss).empty());
}

TEST(DatasetIo, BadMagicReportsOffsetZero) {
  std::string s = encode(random_samples(1, Dims{2, 2, 2}, 1, 5));
  s[0] = 'X';
  std::stringstream ss(s);
  try {
    read_dataset(ss);
    FAIL();
  } catch (const BadMagicError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(DatasetIo, TruncatedPayloadReportsLengths) {
  std::string s = encode(random_samples(2, Dims{4, 4, 4}, 1, 6));
  s.pop_back();
  std::stringstream ss(s);
  try {
    read_dataset(ss);
    FAIL();
  } catch (const TruncatedError& e) {
    EXPECT_EQ(e.expected(), 22u + 128u);
    EXPECT_EQ(e.actual(), 22u + 127u);
    EXPECT_NE(std::string(e.what()).find("expected 150"), std::string::npos);
  }
}

TEST(DatasetIo, TruncatedHeader) {
  std::string s = encode(random_samples(1, Dims{2, 2, 2}, 1, 6)).substr(0, 10);
  std::stringstream ss(s);
  EXPECT_THROW(read_dataset(ss), TruncatedError);
}

TEST(DatasetIo, TrailingBytesRejected) {
  std::string s = encode(random_samples(1, Dims{2, 2, 2}, 1, 6)) + "x";
  std::stringstream ss(s);
  EXPECT_THROW(read_dataset(ss), ParseError);
}

TEST(DatasetIo, HeaderFieldErrorsCarryOffsets) {
  const std::string base = encode(random_samples(1, Dims{2, 2, 2}, 1, 7));
  struct Case {
    std::size_t byte;
    std::uint64_t offset;
  };
  for (const Case c : {Case{4, 4}, Case{6, 6}, Case{8, 8}, Case{10, 10}, Case{12, 12}}) {
    std::string s = base;
    s[c.byte] = c.byte == 4 ? 9 : 0;
    std::stringstream ss(s);
    try {
      read_dataset(ss);
      FAIL() << "byte " << c.byte;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.offset(), c.offset);
    }
  }
}

TEST(DatasetIo, NonBinaryVoxelReportsAbsoluteOffset) {
  std::string s = encode(random_samples(2, Dims{2, 2, 2}, 1, 8));
  s[22 + 8 + 3] = 2;
  std::stringstream ss(s);
  try {
    read_dataset(ss);
    FAIL();
  } catch (const BadVoxelError& e) {
    EXPECT_EQ(e.offset(), 22u + 8u + 3u);
  }
}

TEST(DatasetIo, WriterRejectsMismatchedSamples) {
  std::ostringstream os;
  std::vector<VoxelGrid> mixed{VoxelGrid(Dims{2, 2, 2}), VoxelGrid(Dims{2, 2, 3})};
  EXPECT_THROW(write_dataset(mixed, os), InvalidInputError);
  DatasetWriter w(os, Dims{2, 2, 2}, 1, 2);
  w.write(VoxelGrid(Dims{2, 2, 2}));
  EXPECT_THROW(w.finish(), InvalidInputError);
  EXPECT_THROW(w.write(VoxelGrid(Dims{2, 2, 2}, 2)), InvalidInputError);
}

TEST(DatasetIo, FileHelpers) {
  const auto path = std::filesystem::temp_directory_path() / "vox3d_dataset_io_test.vxg";
  const auto samples = random_samples(3, Dims{3, 3, 3}, 2, 9);
  write_dataset_file(path, samples);
  EXPECT_EQ(read_dataset_file(path), samples);
  const auto h = read_header_file(path);
  EXPECT_EQ(h.sample_count, 3u);
  EXPECT_EQ(h.channels, 2);
  std::filesystem::remove(path);
  EXPECT_THROW(read_dataset_file(path), IoError);
}
