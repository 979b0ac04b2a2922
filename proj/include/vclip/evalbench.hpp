#pragma once

// Synthetic retrieval benchmark: feature packs with planted query-aligned
// segments, recall metrics, a strategy comparison and stage timings.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vclip/chunker.hpp"
#include "vclip/retriever.hpp"
#include "vclip/types.hpp"

namespace vclip {

struct PlantedSegment {
  std::size_t start = 0;
  std::size_t end = 0;   // exclusive
  double strength = 1.0;  // weight of the query direction before noise
};

struct SyntheticSpec {
  std::size_t frame_count = 1000;
  std::size_t dim = 512;
  std::vector<PlantedSegment> segments;
  /// Per-coordinate Gaussian noise added to planted frames.
  double noise_std = 0.1;
  /// 0 gives i.i.d. random background frames. Otherwise the background is
  /// split into this many equal scenes, each a shared random direction plus
  /// per-coordinate noise of `scene_noise`; scene structure is independent
  /// of the query.
  std::size_t num_scenes = 0;
  double scene_noise = 0.02;
  std::uint64_t seed = 0;
};

/// Throws InvalidArgument for segments outside [0, t), overlapping or empty
/// segments, non-positive strength, negative noise, or zero sizes.
void check_spec(const SyntheticSpec& spec);

struct SyntheticSample {
  FeaturePack pack;  // rows unit-normalized, timestamps at 1 fps
  std::vector<float> query;  // unit vector
  std::vector<std::size_t> truth;  // planted frames, ascending
};

/// Planted frame = normalize(strength * q + noise_std * N(0, I)); with zero
/// noise the row equals q exactly, so its similarity is exactly 1.
SyntheticSample generate(const SyntheticSpec& spec);

struct RecallReport {
  double frame_recall = 1.0;  // |selected ∩ truth| / |truth|
  double clip_hit_rate = 1.0;  // planted segments touched by a retrieved range
};

/// Both metrics are 1 by convention when nothing is planted.
RecallReport recall_at_budget(std::span<const std::size_t> selected_frames,
                              std::span<const ClipRange> retrieved,
                              std::span<const PlantedSegment> segments);

enum class Strategy { kUniformSampling, kUniformClips, kSceneClips, kQueryGuided };

std::string_view to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view name);
/// All four, baseline first.
std::vector<Strategy> all_strategies();

struct StrategyRun {
  RetrievalResult result;
  /// Ranges counted for clip hits: the retrieved clips, or one singleton
  /// range per selected frame for the uniform-sampling baseline.
  std::vector<ClipRange> retrieved;
};

/// Evenly spaced frames floor((2i + 1) * t / (2l)) for i in [0, min(l, t)).
std::vector<std::size_t> uniform_sampling(std::size_t frame_count, std::size_t budget);

StrategyRun run_strategy(Strategy strategy, const SyntheticSample& sample, const ChunkConfig& chunk_cfg,
                         const RetrievalConfig& retrieval_cfg);

struct StrategyRow {
  Strategy strategy = Strategy::kUniformSampling;
  std::size_t trials = 0;
  double mean_recall = 0.0;
  double std_recall = 0.0;
  double mean_clip_hit = 0.0;
  double std_clip_hit = 0.0;
};

struct BenchConfig {
  std::size_t trials = 100;
  /// Re-place each planted segment (same length and strength) uniformly at
  /// random in every trial.
  bool randomize_placement = true;
  /// 0 picks std::thread::hardware_concurrency().
  std::size_t threads = 0;
};

/// Trial k uses seed spec.seed + k for both placement and generation. The
/// baseline row is always present and comes first. Rows are in the order
/// requested otherwise.
std::vector<StrategyRow> compare_strategies(const SyntheticSpec& spec, std::span<const Strategy> strategies,
                                            const ChunkConfig& chunk_cfg,
                                            const RetrievalConfig& retrieval_cfg, const BenchConfig& bench);

/// Median wall-clock seconds per stage.
struct StageTimings {
  double similarity = 0.0;
  double chunking = 0.0;
  double retrieval = 0.0;
};

/// One warm-up, then the median of `repeats` timed runs per stage, on the
/// calling thread with a monotonic clock.
StageTimings time_stages(const FeaturePack& pack, std::span<const float> query, const ChunkConfig& chunk_cfg,
                         const RetrievalConfig& retrieval_cfg, std::size_t repeats = 5);

std::string format_table(std::span<const StrategyRow> rows);
std::string format_csv(std::span<const StrategyRow> rows);

}  // namespace vclip
