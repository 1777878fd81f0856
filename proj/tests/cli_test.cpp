#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/cli.hpp"
#include "vox3d/json_io.hpp"

using namespace vox3d;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("vox3d_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::string line_with(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (line.rfind(prefix, 0) == 0) return line;
  return {};
}

}  // namespace

TEST_F(CliTest, GenerateIsDeterministic) {
  for (const char* name : {"a.vxg", "b.vxg"}) {
    const CliRun r = run({"generate", "--kind", "tumors", "--count", "5", "--seed", "42", "--out", path(name)});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(path("a.vxg")), slurp(path("b.vxg")));
  EXPECT_EQ(slurp(path("a.vxg")).size(), 22u + 5u * 4096u);
  EXPECT_TRUE(fs::exists(path("a.vxg.manifest.json")));
}

TEST_F(CliTest, GeneratePackedWritesIsocenters) {
  const CliRun r = run({"generate", "--kind", "tumors-packed", "--count", "4", "--seed", "7", "--out", path("t.vxg"),
                     "--manifest", path("t.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("channels: 2"), std::string::npos);
  EXPECT_FALSE(line_with(r.out, "isocenters: mean").empty());
  const Manifest m = load_json_as<Manifest>(path("t.json"));
  ASSERT_EQ(m.samples.size(), 4u);
  for (const auto& s : m.samples) {
    ASSERT_TRUE(s.isocenters);
    EXPECT_GE(s.isocenters->size(), 1u);
  }
  EXPECT_EQ(read_dataset_file(path("t.vxg")).front().channels(), 2);
}

TEST_F(CliTest, GenerateConfigOverride) {
  {
    std::ofstream cfg(path("cfg.json"));
    cfg << R"({"spheres": {"dims": [12, 12, 12], "r_min": 2, "r_max": 4}})";
  }
  const CliRun r = run({"generate", "--kind", "spheres", "--count", "2", "--seed", "1", "--out", path("s.vxg"),
                     "--config", path("cfg.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_header_file(path("s.vxg")).dims, (Dims{12, 12, 12}));
}

TEST_F(CliTest, EvaluateSelfComparison) {
  ASSERT_EQ(run({"generate", "--kind", "spheres", "--count", "20", "--seed", "1", "--out", path("r.vxg")}).code, 0);
  const CliRun r = run({"evaluate", "--real", path("r.vxg"), "--gen", path("r.vxg"), "--report", path("rep.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string conv = line_with(r.out, "convexity_ratio");
  ASSERT_FALSE(conv.empty());
  EXPECT_NE(conv.find("1.000000 +/- 0.000000"), std::string::npos);
  EXPECT_NE(conv.find(" 0.000000"), std::string::npos);
  EXPECT_EQ(line_with(r.out, "coverage_ratio:"), "coverage_ratio: real 1.000000, generated 1.000000");

  const MetricsReport rep = load_json_as<MetricsReport>(path("rep.json"));
  EXPECT_EQ(rep.real.sample_count, 20u);
  const auto& vol = rep.generated.aggregates.at("volume_size");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f +/- %.6f", vol.mean, vol.std);
  EXPECT_NE(line_with(r.out, "volume_size").find(buf), std::string::npos);
  for (const auto& [name, kl] : rep.kl) EXPECT_EQ(kl, 0.0) << name;
}

TEST_F(CliTest, EvaluateWritesHistograms) {
  ASSERT_EQ(run({"generate", "--kind", "spheres", "--count", "10", "--seed", "1", "--out", path("r.vxg")}).code, 0);
  ASSERT_EQ(run({"generate", "--kind", "tumors", "--count", "10", "--seed", "1", "--out", path("g.vxg")}).code, 0);
  const CliRun r = run({"evaluate", "--real", path("r.vxg"), "--gen", path("g.vxg"), "--histograms", path("h")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(path("h/convexity_ratio.csv"));
  EXPECT_EQ(csv.rfind("bin_left,bin_right,p_real,p_generated\n", 0), 0u);
}

TEST_F(CliTest, EvaluateMissingFileIsDataError) {
  const CliRun r = run({"evaluate", "--real", path("nope.vxg"), "--gen", path("nope.vxg")});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find(path("nope.vxg")), std::string::npos);
}

TEST_F(CliTest, EvaluateIncompatibleDatasets) {
  ASSERT_EQ(run({"generate", "--kind", "spheres", "--count", "3", "--seed", "1", "--out", path("a.vxg")}).code, 0);
  ASSERT_EQ(
      run({"generate", "--kind", "spheres-packed", "--count", "3", "--seed", "1", "--out", path("b.vxg")}).code, 0);
  const CliRun r = run({"evaluate", "--real", path("a.vxg"), "--gen", path("b.vxg")});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(CliTest, PackZeroCoverageAndRepack) {
  ASSERT_EQ(run({"generate", "--kind", "tumors", "--count", "5", "--seed", "3", "--out", path("t.vxg")}).code, 0);
  CliRun r = run({"pack", "--in", path("t.vxg"), "--out", path("z.vxg"), "--coverage", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& g : read_dataset_file(path("z.vxg"))) {
    EXPECT_EQ(g.channels(), 2);
    EXPECT_EQ(g.count(1), 0u);
  }
  r = run({"pack", "--in", path("z.vxg"), "--out", path("zz.vxg")});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find("already"), std::string::npos);
}

TEST_F(CliTest, PackRespectsMaximum) {
  ASSERT_EQ(run({"generate", "--kind", "tumors", "--count", "10", "--seed", "3", "--out", path("t.vxg")}).code, 0);
  const CliRun r = run({"pack", "--in", path("t.vxg"), "--out", path("p.vxg"), "--max", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Manifest m = load_json_as<Manifest>(path("p.vxg.manifest.json"));
  EXPECT_FALSE(m.kind);
  for (const auto& s : m.samples) {
    ASSERT_TRUE(s.isocenters);
    EXPECT_GE(s.isocenters->size(), 1u);
    EXPECT_LE(s.isocenters->size(), 3u);
  }
}

TEST_F(CliTest, ConnlossOnConnectedSpheres) {
  ASSERT_EQ(run({"generate", "--kind", "spheres", "--count", "50", "--seed", "1", "--out", path("s.vxg")}).code, 0);
  CliRun r = run({"connloss", "--in", path("s.vxg"), "--lambda3", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_with(r.out, "batch 0"), "batch 0 [0, 40): -1.000000");
  EXPECT_EQ(line_with(r.out, "batch 1"), "batch 1 [40, 50): -1.000000");
  EXPECT_EQ(line_with(r.out, "overall"), "overall: -1.000000");
  r = run({"connloss", "--in", path("s.vxg"), "--lambda3", "0"});
  EXPECT_EQ(line_with(r.out, "overall"), "overall: 0.000000");
}

TEST_F(CliTest, ConnlossWorkedExamples) {
  // single object: one sample split in two, one intact
  VoxelGrid split(Dims{8, 8, 8}), intact(Dims{8, 8, 8});
  split.set(0, 1, 1, 1);
  split.set(0, 6, 6, 6);
  intact.set(0, 3, 3, 3);
  write_dataset_file(path("single.vxg"), std::vector<VoxelGrid>{split, intact});
  CliRun r = run({"connloss", "--in", path("single.vxg")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_with(r.out, "overall"), "overall: 0.000000");

  // two objects: counts [1, 1] and [1, 2]
  VoxelGrid a(Dims{16, 16, 16}, 2), b(Dims{16, 16, 16}, 2);
  for (VoxelGrid* g : {&a, &b}) {
    g->set(0, 4, 4, 4);
    g->set(1, 4, 4, 4);
    g->set(0, 11, 11, 11);
    g->set(1, 11, 11, 11);
  }
  b.set(0, 13, 11, 11);
  b.set(1, 13, 11, 11);
  write_dataset_file(path("multi.vxg"), std::vector<VoxelGrid>{a, b});
  Manifest m;
  m.count = 2;
  m.dims = Dims{16, 16, 16};
  m.channels = 2;
  for (std::uint64_t i = 0; i < 2; ++i) {
    ManifestSample s;
    s.index = i;
    IsocenterSet iso;
    iso.isocenters.push_back({{4, 4, 4}, 2.0, {}, {}});
    iso.isocenters.push_back({{11, 11, 11}, 3.0, {}, {}});
    s.isocenters = iso;
    m.samples.push_back(s);
  }
  write_json_file(path("multi.json"), json(m));
  r = run({"connloss", "--in", path("multi.vxg"), "--manifest", path("multi.json"), "--expected-objects", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_with(r.out, "overall"), "overall: -1.146447");
  r = run({"connloss", "--in", path("multi.vxg"), "--manifest", path("multi.json"), "--expected-objects", "manifest"});
  EXPECT_EQ(line_with(r.out, "overall"), "overall: -1.146447");
  r = run({"connloss", "--in", path("multi.vxg"), "--manifest", path("multi.json"), "--expected-objects", "3"});
  EXPECT_EQ(r.code, cli::kExitData);
}

TEST_F(CliTest, ConnlossNeedsGroundTruthForMultipleObjects) {
  ASSERT_EQ(
      run({"generate", "--kind", "spheres-packed", "--count", "2", "--seed", "1", "--out", path("p.vxg")}).code, 0);
  CliRun r = run({"connloss", "--in", path("p.vxg"), "--expected-objects", "7"});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find("--manifest"), std::string::npos);
  r = run({"connloss", "--in", path("p.vxg"), "--manifest", path("p.vxg.manifest.json"), "--expected-objects", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_with(r.out, "overall"), "overall: -7.000000");
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"generate", "--kind", "spheres"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"generate", "--kind", "cubes", "--count", "1", "--seed", "1", "--out", path("x")}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"generate", "--kind", "spheres", "--count", "0", "--seed", "1", "--out", path("x")}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"connloss", "--in", path("x"), "--expected-objects", "zero"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}
