#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "vclip/chunker.hpp"
#include "vclip/types.hpp"

namespace vclip {

inline constexpr std::size_t kDefaultTopK = 8;
inline constexpr std::size_t kDefaultFrameBudget = 16;

struct RetrievalConfig {
  std::size_t top_k = kDefaultTopK;
  /// Number of frames handed to the downstream model.
  std::size_t frame_budget = kDefaultFrameBudget;
};

/// Max-pooled similarity per clip. Throws InvalidArgument if `seg` does not
/// partition the series' index range.
std::vector<double> clip_relevance(const SimilaritySeries& series, const Segmentation& seg);

/// The top_k clips by descending relevance, ties to the lower clip index.
std::vector<RankedClip> top_k_clips(std::span<const double> relevances, std::size_t top_k);

/// Chooses at most `budget` frames from the given clips, returned ascending.
///
/// When the clips hold no more than `budget` frames all of them are
/// returned. Otherwise the budget is split proportionally to clip length
/// (largest remainders first), each clip keeps at least one frame while the
/// budget allows, and frames inside a clip are taken at a uniform stride
/// starting at the clip's first frame. If the budget is smaller than the
/// number of clips, the first `budget` clips in `clips` order get one frame.
std::vector<std::size_t> allocate_frames(std::span<const std::size_t> clips,
                                         const Segmentation& seg, std::size_t budget);

/// Max pooling, ranking and frame allocation over an existing segmentation.
RetrievalResult retrieve(const SimilaritySeries& series, const Segmentation& seg,
                         const RetrievalConfig& cfg);

struct PipelineOutput {
  SimilaritySeries series;
  Segmentation segmentation;
  RetrievalResult result;
};

using SimilarityFn = std::function<SimilaritySeries(const FeaturePack&, std::span<const float>)>;

/// Similarity, query-guided chunking and retrieval from one similarity
/// computation that both chunking and ranking reuse. `similarity` is
/// injectable so callers can instrument or replace the scoring backend.
PipelineOutput run_pipeline(const FeaturePack& pack, std::span<const float> query,
                            const ChunkConfig& chunk_cfg, const RetrievalConfig& retrieval_cfg,
                            const SimilarityFn& similarity = similarity_series);

}  // namespace vclip
