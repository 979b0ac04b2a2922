#pragma once

// Planner for synthetic long videos built from a corpus of short ones.
//
// Each anchor video is paired with the short videos that look most like it
// (cosine of average-pooled frame features) and, among those, keeps the ones
// whose instructions differ most (one minus cosine of average-pooled
// instruction features). The result is a manifest describing the
// concatenation; no media is touched.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vclip/types.hpp"

namespace vclip {

/// Frames and instructions sampled per short video.
inline constexpr std::size_t kSamplesPerVideo = 5;
inline constexpr std::size_t kDefaultCandidates = 16;
inline constexpr std::size_t kDefaultRetainedNegatives = 8;

struct ShortVideoEntry {
  std::string video_id;
  std::size_t dim = 0;
  std::vector<float> frame_features;        // kSamplesPerVideo x dim, row-major
  std::vector<float> instruction_features;  // kSamplesPerVideo x dim, row-major
  std::vector<std::string> instruction_ids;  // kSamplesPerVideo
};

/// Throws InvalidArgument unless the entry has kSamplesPerVideo rows of
/// finite values in each matrix and kSamplesPerVideo instruction ids.
void check_entry(const ShortVideoEntry& entry);

/// Cosine of the average-pooled frame features, in [-1, 1].
double visual_relevance(const ShortVideoEntry& a, const ShortVideoEntry& b);

/// 1 - cosine of the average-pooled instruction features, in [0, 2].
double instruction_divergence(const ShortVideoEntry& a, const ShortVideoEntry& b);

struct Candidate {
  std::size_t index = 0;  // position in the corpus
  double relevance = 0.0;
};

/// For every corpus entry, the `per_video` most visually relevant other
/// entries, highest first, ties to the lexicographically lower video id.
/// Result is aligned with `corpus`. Throws InvalidArgument when the corpus
/// has no more than `per_video` entries or contains duplicate ids.
std::vector<std::vector<Candidate>> build_candidates(std::span<const ShortVideoEntry> corpus,
                                                     std::size_t per_video = kDefaultCandidates);

struct SynthesisConfig {
  std::uint64_t seed = 0;
  std::size_t retained_negatives = kDefaultRetainedNegatives;
};

/// One manifest per anchor, in corpus order. Candidates are re-ranked by
/// instruction divergence (highest first, ties keep visual rank), the top
/// `retained_negatives` are kept, and anchor plus negatives are shuffled
/// with a generator keyed on (seed, anchor index).
std::vector<SynthesisManifest> plan_synthesis(std::span<const ShortVideoEntry> corpus,
                                              std::span<const std::vector<Candidate>> candidates,
                                              const SynthesisConfig& cfg);

/// Reads a JSONL index whose lines are
///   {"video_id", "frames": PATH, "instructions": PATH, "instruction_ids": [...]}
/// where both paths name feature packs (relative to the index's directory)
/// holding kSamplesPerVideo rows.
std::vector<ShortVideoEntry> read_short_video_index(const std::filesystem::path& index);

}  // namespace vclip
