#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "test_util.hpp"
#include "vclip/chunker.hpp"
#include "vclip/error.hpp"
#include "vclip/validation.hpp"

namespace vclip {
namespace {

const std::vector<double> kRunning = {0.1, 0.5, 0.2, 0.6, 0.3};

std::vector<ClipRange> ranges(std::initializer_list<std::pair<std::size_t, std::size_t>> list) {
  std::vector<ClipRange> out;
  for (auto [a, b] : list) out.push_back({a, b});
  return out;
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return "";
}

// --- similarity_series ---------------------------------------------------

TEST(SimilaritySeries, IdenticalDirectionIsExactlyOne) {
  const auto pack = test::pack_from_rows({{3, 4}});
  const std::vector<float> q{3, 4};
  EXPECT_EQ(similarity_series(pack, q)[0], 1.0);
}

TEST(SimilaritySeries, OrthogonalIsZero) {
  const auto pack = test::pack_from_rows({{1, 0}});
  const std::vector<float> q{0, 1};
  EXPECT_EQ(similarity_series(pack, q)[0], 0.0);
}

TEST(SimilaritySeries, DiagonalIsInverseRootTwo) {
  const auto pack = test::pack_from_rows({{1, 1}});
  const std::vector<float> q{1, 0};
  EXPECT_NEAR(similarity_series(pack, q)[0], 0.7071067811865475, 1e-12);
}

TEST(SimilaritySeries, Errors) {
  const auto pack = test::pack_from_rows({{1, 0}, {0, 0}});
  const std::vector<float> q3{1, 0, 0};
  const auto dims = error_of([&] { similarity_series(pack, q3); });
  EXPECT_NE(dims.find('3'), std::string::npos);
  EXPECT_NE(dims.find('2'), std::string::npos);
  const std::vector<float> q{1, 0};
  EXPECT_NE(error_of([&] { similarity_series(pack, q); }).find("frame 1"), std::string::npos);
  const std::vector<float> zero{0, 0};
  EXPECT_NE(error_of([&] { similarity_series(test::pack_from_rows({{1, 0}}), zero); }).find("zero norm"),
            std::string::npos);
}

// --- peak_scores ----------------------------------------------------------

TEST(PeakScores, RunningExample) {
  const auto g = peak_scores(kRunning);
  const std::vector<double> expected = {0.0, 0.7, 0.1, 0.8, 0.2};
  ASSERT_EQ(g.size(), expected.size());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], expected[i], 1e-12) << i;
  EXPECT_EQ(g, oracle::peak_scores(kRunning));
}

TEST(PeakScores, ConstantAndSingleton) {
  EXPECT_EQ(peak_scores(std::vector<double>{0.3, 0.3, 0.3}), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(peak_scores(std::vector<double>{0.4}), (std::vector<double>{0.0}));
  EXPECT_THROW(peak_scores(std::vector<double>{}), InvalidArgument);
}

TEST(PeakScores, MatchesLiteralOracleExactly) {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = oracle::uniform_series(rng, 1 + rng() % 128);
    ASSERT_EQ(peak_scores(s), oracle::peak_scores(s)) << "trial " << trial;
  }
}

// --- select_centers -------------------------------------------------------

TEST(SelectCenters, RunningExample) {
  // 1-based centers {2, 4}.
  EXPECT_EQ(select_centers(std::vector<double>{0.0, 0.7, 0.1, 0.8, 0.2}, 2),
            (std::vector<std::size_t>{1, 3}));
}

TEST(SelectCenters, TiesGoToLowerIndex) {
  EXPECT_EQ(select_centers(std::vector<double>{0.5, 0.5, 0.5}, 1), (std::vector<std::size_t>{0}));
  EXPECT_EQ(select_centers(std::vector<double>{0.1, 0.5, 0.5, 0.5}, 2), (std::vector<std::size_t>{1, 2}));
}

TEST(SelectCenters, AllAndTooMany) {
  EXPECT_EQ(select_centers(std::vector<double>{0.3, 0.1, 0.2}, 3), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_THROW(select_centers(std::vector<double>{0.3, 0.1}, 3), InvalidArgument);
  EXPECT_THROW(select_centers(std::vector<double>{0.3, 0.1}, 0), InvalidArgument);
}

// --- optimal_boundary -----------------------------------------------------

TEST(OptimalBoundary, RisingTailPrefersLateSplit) {
  const std::vector<double> gap{0.8, 0.3, 0.4, 0.9};
  EXPECT_NEAR(oracle::boundary_objective(gap, 1), 0.8, 1e-12);
  EXPECT_NEAR(oracle::boundary_objective(gap, 2), 0.9, 1e-12);
  EXPECT_EQ(optimal_boundary(gap), 2u);
}

TEST(OptimalBoundary, VShapeSplitsAtTheValley) {
  const std::vector<double> gap{0.9, 0.1, 0.9, 0.9};
  EXPECT_NEAR(oracle::boundary_objective(gap, 1), 1.2, 1e-12);
  EXPECT_NEAR(oracle::boundary_objective(gap, 2), 0.0, 1e-12);
  EXPECT_EQ(optimal_boundary(gap), 1u);
}

TEST(OptimalBoundary, EqualObjectivesReturnLowerB) {
  // Flat gap: every candidate scores exactly 0.
  EXPECT_EQ(optimal_boundary(std::vector<double>{0.5, 0.5, 0.5, 0.5, 0.5}), 1u);
  // Dyadic values with objective(1) == objective(2) == 0.5 exactly.
  const std::vector<double> gap{0.75, 0.5, 0.625, 1.0};
  ASSERT_EQ(oracle::boundary_objective(gap, 1), 0.5);
  ASSERT_EQ(oracle::boundary_objective(gap, 2), 0.5);
  EXPECT_EQ(optimal_boundary(gap), oracle::exhaustive_boundary(gap));
  EXPECT_EQ(optimal_boundary(gap), 1u);
}

TEST(OptimalBoundary, DegenerateGap) {
  EXPECT_FALSE(optimal_boundary(std::vector<double>{0.2, 0.6}));
  EXPECT_FALSE(optimal_boundary(std::vector<double>{0.6}));
  EXPECT_TRUE(optimal_boundary(std::vector<double>{0.2, 0.3, 0.6}));
}

TEST(OptimalBoundary, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t tj = 2 + rng() % 63;
    const auto gap = oracle::uniform_series(rng, tj + 1);
    ASSERT_EQ(optimal_boundary(gap), oracle::exhaustive_boundary(gap)) << "trial " << trial;
  }
}

// --- chunk ----------------------------------------------------------------

TEST(Chunk, RunningExample) {
  const auto seg = chunk(SimilaritySeries(kRunning), {2});
  EXPECT_EQ(seg.centers, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(seg.clips, ranges({{0, 3}, {3, 5}}));
  EXPECT_EQ(seg.method, ChunkMethod::kQueryGuided);
}

TEST(Chunk, SingleClipAndOneFramePerClip) {
  EXPECT_EQ(chunk(SimilaritySeries(kRunning), {1}).clips, ranges({{0, 5}}));
  const auto seg = chunk(SimilaritySeries(kRunning), {5});
  EXPECT_EQ(seg.clips, ranges({{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}}));
  EXPECT_THROW(chunk(SimilaritySeries(kRunning), {6}), InvalidArgument);
}

TEST(Chunk, UsesOptimalBoundaryInsideWideGaps) {
  // Centers land on the two high frames (0-based 1 and 6); the gap between
  // them is 0.8, 0.3, 0.4, 0.35 with the right center at 0.9.
  const std::vector<double> s{0.0, 0.95, 0.8, 0.3, 0.4, 0.35, 0.9, 0.05};
  const auto seg = chunk(SimilaritySeries(s), {2});
  ASSERT_EQ(seg.centers, (std::vector<std::size_t>{1, 6}));
  const std::vector<double> gap(s.begin() + 2, s.begin() + 7);
  const std::size_t b = oracle::exhaustive_boundary(gap);
  EXPECT_EQ(seg.clips[1].start, 2 + b);
}

TEST(Chunk, PartitionAndCenterContainmentFuzz) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t t = 1 + rng() % 60;
    const auto s = oracle::uniform_series(rng, t);
    const std::size_t n = 1 + rng() % t;
    const auto seg = chunk(SimilaritySeries(s), {n});
    ASSERT_TRUE(validate_segmentation(seg, t).empty()) << "trial " << trial;
    ASSERT_EQ(seg.n(), n);
    ASSERT_EQ(seg.centers.size(), n);
    for (std::size_t j = 0; j < n; ++j) ASSERT_TRUE(seg.clips[j].contains(seg.centers[j]));
  }
}

TEST(Chunk, ShiftingTheSeriesChangesNothing) {
  // Dyadic grid values keep the arithmetic exact, so G is bit-identical.
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t t = 2 + rng() % 80;
    std::vector<double> s(t), shifted(t);
    for (std::size_t i = 0; i < t; ++i) {
      s[i] = static_cast<double>(rng() % 512) / 1024.0;
      shifted[i] = s[i] + 0.25;
    }
    ASSERT_EQ(peak_scores(s), peak_scores(shifted));
    const std::size_t n = 1 + rng() % t;
    ASSERT_EQ(chunk(SimilaritySeries(s), {n}), chunk(SimilaritySeries(shifted), {n}));
  }
}

// --- baselines ------------------------------------------------------------

TEST(UniformChunk, Examples) {
  EXPECT_EQ(uniform_chunk(10, 2).clips, ranges({{0, 5}, {5, 10}}));
  EXPECT_EQ(uniform_chunk(5, 2).clips, ranges({{0, 3}, {3, 5}}));
  EXPECT_EQ(uniform_chunk(5, 5).clips, ranges({{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}}));
  EXPECT_EQ(uniform_chunk(7, 3).clips, ranges({{0, 3}, {3, 5}, {5, 7}}));
  EXPECT_THROW(uniform_chunk(3, 4), InvalidArgument);
}

TEST(SceneChunk, CutsAtBlockJunction) {
  const auto pack = test::pack_from_rows({{1, 0}, {1, 0}, {1, 0}, {0, 1}, {0, 1}, {0, 1}});
  const auto seg = scene_chunk(pack, 2);
  EXPECT_EQ(seg.clips, ranges({{0, 3}, {3, 6}}));
  EXPECT_EQ(seg.method, ChunkMethod::kScene);
  EXPECT_TRUE(seg.centers.empty());
}

TEST(SceneChunk, ConstantPackCutsAtFirstAdjacency) {
  const auto pack = test::pack_from_rows({{1, 2}, {1, 2}, {1, 2}, {1, 2}});
  EXPECT_EQ(scene_chunk(pack, 2).clips, ranges({{0, 1}, {1, 4}}));
}

TEST(SceneChunk, ThreeBlocks) {
  // Junction 1->2 is orthogonal (cos 0); junction 2->3 is at 45 degrees.
  const auto pack = test::pack_from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}, {0, 1}, {1, 1}, {1, 1}});
  EXPECT_EQ(scene_chunk(pack, 3).clips, ranges({{0, 2}, {2, 5}, {5, 7}}));
  // With one cut only the deeper valley is used.
  EXPECT_EQ(scene_chunk(pack, 2).clips, ranges({{0, 2}, {2, 7}}));
}

TEST(SceneChunk, ZeroRowRejected) {
  EXPECT_THROW(scene_chunk(test::pack_from_rows({{1, 0}, {0, 0}}), 2), InvalidArgument);
}

}  // namespace
}  // namespace vclip
