#pragma once

// Query-guided temporal chunking.
//
// A single query-to-frame similarity series drives everything: frames whose
// similarity stands out against the lowest values on either side become
// cluster centers, and each gap between adjacent centers is split at the
// point that best separates a falling run (joined to the left center) from
// a rising run (joined to the right center). Uniform and scene-valley
// segmentations are provided as query-independent baselines.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vclip/types.hpp"

namespace vclip {

inline constexpr std::size_t kDefaultNumClips = 32;

struct ChunkConfig {
  /// Number of clips (and cluster centers). Must satisfy 1 <= n <= t.
  std::size_t num_clips = kDefaultNumClips;
};

/// Cosine similarity between every frame row and the query, accumulated in
/// double precision and clamped to [-1, 1].
///
/// Throws InvalidArgument on a dimension mismatch (naming both dims), on a
/// non-finite value, or on a zero-norm query or frame row (naming the row).
SimilaritySeries similarity_series(const FeaturePack& pack, std::span<const float> query);

/// Peak score of each frame:
///
///   g_i = 2 s_i - L_i - R_i
///
/// where L_i is the minimum of the earlier values not exceeding s_i and R_i
/// the minimum of the later values not exceeding s_i. A side with no such
/// value contributes s_i, so edge frames and plateau frames score 0.
///
/// The eligible minimum on a side equals min(s_i, running minimum of that
/// side), so the whole series is scored in O(t) with two sweeps.
std::vector<double> peak_scores(std::span<const double> series);

/// The n highest-scoring frames, ties to the lower index, returned ascending.
/// Throws InvalidArgument if n == 0 or n > scores.size().
std::vector<std::size_t> select_centers(std::span<const double> scores, std::size_t n);

/// Best split of the frames strictly between two adjacent centers.
///
/// `gap` holds the t_j similarities of the gap frames followed by the
/// similarity of the right center (t_j + 1 values). With 1-based local
/// indices, candidate b assigns gap frames 1..b to the left clip and scores
///
///   sum_{k=1..b} (s_k - s_{k+1}) + (1 / (t_j - b)) * sum_{l=b+1..t_j} (s_{l+1} - s_l)
///
/// for b in 1..t_j-1 (b = t_j would divide by zero). Both sums are read off
/// one prefix-sum array of consecutive differences, O(t_j) overall. Ties go
/// to the lower b.
///
/// Returns std::nullopt when t_j < 2 (no interior choice exists).
std::optional<std::size_t> optimal_boundary(std::span<const double> gap);

/// Full query-guided chunking of a similarity series into cfg.num_clips
/// clips. Frames before the first center join the first clip and frames
/// after the last center join the last clip. A gap of exactly one frame is
/// assigned to the left center; adjacent centers split with no gap frames.
Segmentation chunk(const SimilaritySeries& series, const ChunkConfig& cfg);

/// n contiguous clips of size ceil(t/n) or floor(t/n), larger clips first.
Segmentation uniform_chunk(std::size_t frame_count, std::size_t n);

/// Query-independent baseline: cuts after the n-1 frames whose cosine with
/// the next frame is lowest (ties to the lower index).
Segmentation scene_chunk(const FeaturePack& pack, std::size_t n);

}  // namespace vclip
