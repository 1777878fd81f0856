#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vox3d/hull.hpp"
#include "vox3d/rotation.hpp"

using namespace vox3d;

namespace {

std::size_t count_of(const std::vector<Index3>& v) { return convex_hull_lattice_count(std::span<const Index3>(v)); }

}  // namespace

TEST(Hull, MatchesFacetOracleOnRandomSmallSets) {
  Rng rng(99);
  int checked = 0;
  while (checked < 400) {
    const int n = rng.range(4, 10);
    std::vector<Index3> pts;
    std::vector<oracle::I3> ipts;
    for (int i = 0; i < n; ++i) {
      const Index3 p{rng.range(0, 7), rng.range(0, 7), rng.range(0, 7)};
      pts.push_back(p);
      ipts.push_back({p.x, p.y, p.z});
    }
    if (!oracle::full_dimensional(ipts)) continue;
    ASSERT_EQ(count_of(pts), oracle::brute_force_hull_count(ipts));
    ++checked;
  }
}

TEST(Hull, MatchesFacetOracleOnDenseBlobs) {
  Rng rng(3);
  for (int t = 0; t < 60; ++t) {
    std::vector<Index3> pts;
    std::vector<oracle::I3> ipts;
    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y)
        for (int z = 0; z < 5; ++z)
          if (rng.bernoulli(0.15)) {
            pts.push_back({x, y, z});
            ipts.push_back({x, y, z});
          }
    if (pts.size() < 4 || !oracle::full_dimensional(ipts)) continue;
    ASSERT_EQ(count_of(pts), oracle::brute_force_hull_count(ipts));
  }
}

TEST(Hull, DigitizedBallIsItsOwnHull) {
  const auto ball = oracle::lattice_ball(5.0, {8, 8, 8});
  ASSERT_EQ(ball.size(), 515u);
  EXPECT_EQ(count_of(ball), 515u);
}

TEST(Hull, DegenerateInputsFallBack) {
  EXPECT_EQ(count_of({{2, 2, 2}}), 1u);
  EXPECT_EQ(count_of({{0, 0, 0}, {4, 2, 0}}), 3u);                       // gcd(4, 2) + 1
  EXPECT_EQ(count_of({{0, 0, 0}, {3, 0, 0}, {0, 3, 0}}), 10u);           // triangle legs 3
  EXPECT_EQ(count_of({{0, 0, 0}, {2, 0, 0}, {0, 2, 0}, {2, 2, 0}}), 9u);  // 3x3 square
  EXPECT_EQ(count_of({{0, 0, 0}, {2, 2, 2}, {1, 1, 1}}), 3u);
  // tilted plane x + y + z = 3 through the unit-step triangle
  EXPECT_EQ(count_of({{3, 0, 0}, {0, 3, 0}, {0, 0, 3}}), 10u);
}

TEST(Hull, CubeAndTetrahedron) {
  std::vector<Index3> cube;
  for (int x : {0, 3})
    for (int y : {0, 3})
      for (int z : {0, 3}) cube.push_back({x, y, z});
  EXPECT_EQ(count_of(cube), 64u);
  EXPECT_EQ(count_of({{0, 0, 0}, {2, 0, 0}, {0, 2, 0}, {0, 0, 2}}), 10u);
}

TEST(Hull, EmptyInputThrows) {
  EXPECT_THROW(count_of({}), InvalidInputError);
}

TEST(Hull, CornersOfTwoCubeGiveFullLattice) {
  std::vector<Index3> corners;
  for (int x : {0, 2})
    for (int y : {0, 2})
      for (int z : {0, 2}) corners.push_back({x, y, z});
  EXPECT_EQ(count_of(corners), 27u);
}

TEST(Hull, InvariantUnderCubeRotations) {
  Rng rng(21);
  for (int t = 0; t < 40; ++t) {
    std::vector<Index3> pts;
    for (int i = 0, n = rng.range(1, 12); i < n; ++i) pts.push_back({rng.range(0, 6), rng.range(0, 6), rng.range(0, 6)});
    const std::size_t base = count_of(pts);
    for (const auto& r : all_cube_rotations()) {
      std::vector<Index3> rotated;
      for (const auto& p : pts) rotated.push_back(r.apply(p, 7));
      ASSERT_EQ(count_of(rotated), base);
    }
  }
}
