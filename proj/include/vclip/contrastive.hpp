#pragma once

// Contrastive objectives over query-frame similarities.
//
// For positive-clip frames s_1..s_m and negative frames s_j, both objectives
// have the form
//
//   L = -(1/m) * sum_i log( exp(s_i/tau) / (exp(s_i/tau) + sum_j exp(s_j/tau)) )
//
// They differ only in where the negatives come from: coarse negatives are
// frames of other videos, fine negatives are frames of other clips of the
// positive's own video. mine_pairs produces both kinds of pair.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vclip/types.hpp"

namespace vclip {

inline constexpr double kDefaultTemperature = 0.07;
inline constexpr std::size_t kDefaultCoarseNegatives = 8;

/// Shared kernel behind coarse_loss and fine_loss; ignores batch.mode.
/// Requires at least one positive, temperature > 0 and finite similarities.
double contrastive_loss(const ContrastiveBatch& batch);

/// Throws InvalidArgument unless batch.mode is kCoarse.
double coarse_loss(const ContrastiveBatch& batch);
/// Throws InvalidArgument unless batch.mode is kFine.
double fine_loss(const ContrastiveBatch& batch);

struct LossGradient {
  std::vector<double> positives;  // dL/ds_i, aligned with positive_similarities
  std::vector<double> negatives;  // dL/ds_j, aligned with negative_similarities
};

LossGradient loss_gradient(const ContrastiveBatch& batch);

struct LabeledQuery {
  std::string query_id;
  std::size_t positive_clip = 0;  // index into the video's segmentation
};

struct CorpusVideo {
  std::string video_id;
  Segmentation segmentation;
  std::vector<LabeledQuery> queries;
};

struct MiningConfig {
  LossMode mode = LossMode::kCoarse;
  /// Coarse mode only: clips sampled from other videos per query.
  std::size_t coarse_negatives = kDefaultCoarseNegatives;
  std::uint64_t seed = 0;
};

struct MiningOutput {
  std::vector<MinedPair> pairs;
  /// Human-readable notes about skipped queries.
  std::vector<std::string> warnings;
};

/// Pairs come out in corpus order (video, then query). Coarse negatives are
/// sampled without replacement from the clips of every other video, using a
/// generator keyed on (seed, query ordinal), and listed in corpus order.
/// Fine negatives are all other clips of the same video; single-clip videos
/// are skipped with a warning.
///
/// Throws InvalidArgument on duplicate video ids or out-of-range labels.
MiningOutput mine_pairs(std::span<const CorpusVideo> corpus, const MiningConfig& cfg);

/// Per-frame batch for a mined pair: positives are the similarities of the
/// positive clip's frames, negatives those of every negative clip's frames.
/// `series_of` maps a video id to that video's similarity series for the
/// pair's query.
template <typename SeriesLookup>
ContrastiveBatch batch_for_pair(const MinedPair& pair, double temperature, SeriesLookup&& series_of) {
  ContrastiveBatch batch;
  batch.mode = pair.mode;
  batch.temperature = temperature;
  const auto& pos = series_of(pair.positive.video_id);
  for (std::size_t f = pair.positive.clip.start; f < pair.positive.clip.end; ++f) {
    batch.positive_similarities.push_back(pos[f]);
  }
  for (const auto& neg : pair.negatives) {
    const auto& s = series_of(neg.video_id);
    for (std::size_t f = neg.clip.start; f < neg.clip.end; ++f) batch.negative_similarities.push_back(s[f]);
  }
  return batch;
}

}  // namespace vclip
