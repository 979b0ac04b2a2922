#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "vclip/chunker.hpp"
#include "vclip/error.hpp"
#include "vclip/evalbench.hpp"
#include "vclip/validation.hpp"

namespace vclip {
namespace {

SyntheticSpec one_segment(double sigma, std::uint64_t seed, std::size_t t = 1000, std::size_t d = 512) {
  SyntheticSpec spec;
  spec.frame_count = t;
  spec.dim = d;
  spec.segments = {{2 * t / 5, 9 * t / 20, 1.0}};  // 5% of the video
  spec.noise_std = sigma;
  spec.seed = seed;
  return spec;
}

TEST(Generate, NoiselessSegmentIsExact) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto sample = generate(one_segment(0.0, seed));
    EXPECT_TRUE(validate_pack(sample.pack).empty());
    const auto s = similarity_series(sample.pack, sample.query);
    for (std::size_t f = 0; f < s.size(); ++f) {
      if (f >= 400 && f < 450) {
        ASSERT_EQ(s[f], 1.0);
      } else {
        ASSERT_LE(std::abs(s[f]), 0.2) << "seed " << seed << " frame " << f;
      }
    }
    ASSERT_EQ(sample.truth.size(), 50u);
    EXPECT_EQ(sample.truth.front(), 400u);
    EXPECT_EQ(sample.truth.back(), 449u);
  }
}

TEST(Generate, DeterministicAndSeedSensitive) {
  const auto a = generate(one_segment(0.1, 5, 200, 32));
  const auto b = generate(one_segment(0.1, 5, 200, 32));
  const auto c = generate(one_segment(0.1, 6, 200, 32));
  EXPECT_TRUE(std::ranges::equal(a.pack.features(), b.pack.features()));
  EXPECT_EQ(a.query, b.query);
  EXPECT_FALSE(std::ranges::equal(a.pack.features(), c.pack.features()));
  EXPECT_EQ(a.pack.count(), c.pack.count());
  EXPECT_EQ(a.pack.dim(), c.pack.dim());
}

TEST(Generate, NoSegmentsMeansEmptyTruth) {
  SyntheticSpec spec = one_segment(0.1, 1, 100, 16);
  spec.segments.clear();
  const auto sample = generate(spec);
  EXPECT_TRUE(sample.truth.empty());
  const std::vector<std::size_t> frames{1, 2};
  const auto rep = recall_at_budget(frames, {}, spec.segments);
  EXPECT_EQ(rep.frame_recall, 1.0);
  EXPECT_EQ(rep.clip_hit_rate, 1.0);
}

TEST(Generate, SceneBackgroundIsPiecewiseSimilar) {
  SyntheticSpec spec = one_segment(0.1, 2, 400, 64);
  spec.segments.clear();
  spec.num_scenes = 4;
  const auto sample = generate(spec);
  const auto seg = scene_chunk(sample.pack, 4);
  EXPECT_EQ(seg.clips, (std::vector<ClipRange>{{0, 100}, {100, 200}, {200, 300}, {300, 400}}));
}

TEST(Generate, InvalidSpecs) {
  auto spec = one_segment(0.1, 0, 100, 8);
  spec.segments = {{90, 110, 1.0}};
  EXPECT_THROW(generate(spec), InvalidArgument);
  spec.segments = {{10, 20, 1.0}, {15, 25, 1.0}};
  EXPECT_THROW(generate(spec), InvalidArgument);
  spec.segments = {{10, 10, 1.0}};
  EXPECT_THROW(generate(spec), InvalidArgument);
  spec.segments = {{10, 20, 0.0}};
  EXPECT_THROW(generate(spec), InvalidArgument);
  spec.segments = {{10, 20, 1.0}};
  spec.noise_std = -0.1;
  EXPECT_THROW(generate(spec), InvalidArgument);
}

TEST(RecallAtBudget, Arithmetic) {
  const std::vector<PlantedSegment> truth{{10, 20, 1.0}};
  std::vector<std::size_t> all(10);
  for (std::size_t i = 0; i < 10; ++i) all[i] = 10 + i;
  EXPECT_EQ(recall_at_budget(all, {}, truth).frame_recall, 1.0);
  const std::vector<std::size_t> outside{0, 1, 30};
  EXPECT_EQ(recall_at_budget(outside, {}, truth).frame_recall, 0.0);
  const std::vector<std::size_t> half{0, 10, 12, 14, 16, 18, 25};
  EXPECT_EQ(recall_at_budget(half, {}, truth).frame_recall, 0.5);

  const std::vector<PlantedSegment> two{{10, 20, 1.0}, {50, 60, 1.0}};
  const std::vector<ClipRange> clips{{0, 11}, {30, 40}};
  EXPECT_EQ(recall_at_budget({}, clips, two).clip_hit_rate, 0.5);
}

TEST(UniformSampling, EvenlySpacedMidpoints) {
  EXPECT_EQ(uniform_sampling(1000, 4), (std::vector<std::size_t>{125, 375, 625, 875}));
  EXPECT_EQ(uniform_sampling(3, 10), (std::vector<std::size_t>{0, 1, 2}));
  const auto frames = uniform_sampling(1000, 16);
  ASSERT_EQ(frames.size(), 16u);
  for (std::size_t i = 1; i < frames.size(); ++i) EXPECT_EQ(frames[i] - frames[i - 1], 62u + (i % 2 == 0));
}

TEST(Strategy, NamesRoundTrip) {
  for (Strategy s : all_strategies()) EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_THROW(parse_strategy("key_frames"), InvalidArgument);
  EXPECT_EQ(all_strategies().front(), Strategy::kUniformSampling);
}

TEST(CompareStrategies, NoiselessQueryGuidedAlwaysHits) {
  const auto spec = one_segment(0.0, 100, 1000, 64);
  const std::vector<Strategy> only{Strategy::kQueryGuided};
  const auto rows = compare_strategies(spec, only, {32}, {8, 16}, {40, true, 0});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].strategy, Strategy::kUniformSampling);
  EXPECT_EQ(rows[1].strategy, Strategy::kQueryGuided);
  EXPECT_EQ(rows[1].mean_clip_hit, 1.0);
  EXPECT_EQ(rows[1].std_clip_hit, 0.0);
}

TEST(CompareStrategies, BaselineHitsAboutPointEightFrames) {
  // 50 of 1000 frames planted, 16 evenly spaced picks: 0.8 expected frame hits.
  const auto spec = one_segment(0.1, 7, 1000, 16);
  const auto rows = compare_strategies(spec, {}, {32}, {8, 16}, {600, true, 0});
  ASSERT_EQ(rows.size(), 1u);
  const double mean_hits = rows[0].mean_recall * 50.0;
  EXPECT_NEAR(mean_hits, 0.8, 0.05);
}

TEST(CompareStrategies, SceneClipsNoBetterThanQueryGuided) {
  SyntheticSpec spec = one_segment(0.1, 300, 1000, 64);
  spec.num_scenes = 12;
  const std::vector<Strategy> both{Strategy::kSceneClips, Strategy::kQueryGuided};
  const auto rows = compare_strategies(spec, both, {32}, {8, 16}, {500, true, 0});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LE(rows[1].mean_clip_hit, rows[2].mean_clip_hit);
  EXPECT_GT(rows[2].mean_recall, rows[0].mean_recall);
}

TEST(CompareStrategies, ThreadCountDoesNotChangeResults) {
  const auto spec = one_segment(0.1, 11, 300, 32);
  const auto strategies = all_strategies();
  const auto serial = compare_strategies(spec, strategies, {16}, {4, 8}, {24, true, 1});
  const auto parallel = compare_strategies(spec, strategies, {16}, {4, 8}, {24, true, 4});
  ASSERT_EQ(serial.size(), 4u);
  EXPECT_EQ(format_csv(serial), format_csv(parallel));
}

TEST(Format, TableAndCsvShapes) {
  const std::vector<StrategyRow> rows{{Strategy::kUniformSampling, 3, 0.1, 0.01, 0.2, 0.02},
                                      {Strategy::kQueryGuided, 3, 0.9, 0.05, 1.0, 0.0}};
  const auto csv = format_csv(rows);
  EXPECT_EQ(csv,
            "strategy,trials,mean_recall,std_recall,mean_clip_hit,std_clip_hit\n"
            "uniform_sampling,3,0.100000,0.010000,0.200000,0.020000\n"
            "query_guided,3,0.900000,0.050000,1.000000,0.000000\n");
  const auto table = format_table(rows);
  EXPECT_NE(table.find("uniform_sampling (baseline)"), std::string::npos);
  EXPECT_NE(table.find("query_guided"), std::string::npos);
}

TEST(TimeStages, TinyInputIsFast) {
  auto spec = one_segment(0.1, 3, 10, 16);
  spec.segments = {{2, 4, 1.0}};
  const auto tiny = generate(spec);
  const auto timings = time_stages(tiny.pack, tiny.query, {4}, {2, 4});
  EXPECT_LT(timings.similarity, 1e-3);
  EXPECT_LT(timings.chunking, 1e-3);
  EXPECT_LT(timings.retrieval, 1e-3);
  EXPECT_GE(timings.similarity, 0.0);
  EXPECT_THROW(time_stages(tiny.pack, tiny.query, {4}, {2, 4}, 0), InvalidArgument);
}

}  // namespace
}  // namespace vclip
