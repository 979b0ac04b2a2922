#pragma once

// Shared domain types. Everything here is a value type that is not mutated
// after construction, so instances can be shared freely across threads.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vclip {

/// Dense per-frame embeddings of one video plus their timestamps (seconds).
/// Features are row-major, one row of `dim` floats per frame.
class FeaturePack {
 public:
  FeaturePack() = default;

  /// Throws InvalidArgument if `features.size() != timestamps.size() * dim`.
  /// Semantic invariants (monotone time, finite rows, unit norms) are not
  /// enforced here; see validate_pack.
  FeaturePack(std::string video_id, std::size_t dim, std::vector<double> timestamps,
              std::vector<float> features, bool normalized);

  const std::string& video_id() const noexcept { return video_id_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t count() const noexcept { return timestamps_.size(); }
  bool normalized() const noexcept { return normalized_; }
  std::span<const double> timestamps() const noexcept { return timestamps_; }
  std::span<const float> features() const noexcept { return features_; }

  std::span<const float> row(std::size_t frame) const noexcept {
    return std::span<const float>(features_).subspan(frame * dim_, dim_);
  }

  friend bool operator==(const FeaturePack&, const FeaturePack&) = default;

 private:
  std::string video_id_;
  std::size_t dim_ = 0;
  std::vector<double> timestamps_;
  std::vector<float> features_;
  bool normalized_ = false;
};

struct QueryRecord {
  std::string query_id;
  std::string text;
  std::optional<std::vector<float>> embedding;

  friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

/// Query-to-frame cosine similarity, one value per densely sampled frame.
class SimilaritySeries {
 public:
  SimilaritySeries() = default;
  /// Throws InvalidArgument if any value is non-finite or outside [-1, 1]
  /// by more than kSlack.
  explicit SimilaritySeries(std::vector<double> values);

  static constexpr double kSlack = 1e-6;

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// Half-open frame index range [start, end).
struct ClipRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - start; }
  bool contains(std::size_t frame) const noexcept { return frame >= start && frame < end; }
  bool overlaps(const ClipRange& other) const noexcept {
    return start < other.end && other.start < end;
  }

  friend bool operator==(const ClipRange&, const ClipRange&) = default;
};

enum class ChunkMethod { kUniform, kScene, kQueryGuided };

std::string_view to_string(ChunkMethod method) noexcept;
/// Accepts "uniform", "scene", "query_guided". Throws InvalidArgument otherwise.
ChunkMethod parse_chunk_method(std::string_view name);

struct Segmentation {
  std::vector<ClipRange> clips;
  ChunkMethod method = ChunkMethod::kUniform;
  /// Cluster centers (0-based frame indices, ascending). Empty for the
  /// query-independent baselines.
  std::vector<std::size_t> centers;

  std::size_t n() const noexcept { return clips.size(); }
  /// Index of the clip containing `frame`, or n() if none does.
  std::size_t clip_of(std::size_t frame) const noexcept;

  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

struct RankedClip {
  std::size_t clip = 0;
  double relevance = 0.0;

  friend bool operator==(const RankedClip&, const RankedClip&) = default;
};

struct RetrievalResult {
  std::vector<RankedClip> ranked_clips;  // descending relevance
  std::vector<std::size_t> selected_frames;  // ascending global frame indices
  std::size_t budget = 0;

  friend bool operator==(const RetrievalResult&, const RetrievalResult&) = default;
};

enum class LossMode { kCoarse, kFine };

std::string_view to_string(LossMode mode) noexcept;
LossMode parse_loss_mode(std::string_view name);

struct ContrastiveBatch {
  std::vector<double> positive_similarities;
  std::vector<double> negative_similarities;
  double temperature = 0.07;
  LossMode mode = LossMode::kCoarse;
};

struct ClipRef {
  std::string video_id;
  ClipRange clip;

  friend bool operator==(const ClipRef&, const ClipRef&) = default;
};

/// One exported training example. Coarse negatives come from other videos,
/// fine negatives from disjoint clips of the positive's own video.
struct MinedPair {
  std::string query_id;
  LossMode mode = LossMode::kCoarse;
  ClipRef positive;
  std::vector<ClipRef> negatives;
  std::optional<double> loss;

  friend bool operator==(const MinedPair&, const MinedPair&) = default;
};

struct InstructionRef {
  std::string query_id;
  std::string source_video_id;

  friend bool operator==(const InstructionRef&, const InstructionRef&) = default;
};

/// Recipe for one synthetic long video: the anchor short video concatenated
/// with its retained negatives, in `components` order.
struct SynthesisManifest {
  std::string anchor_id;
  std::vector<std::string> components;
  std::size_t anchor_position = 0;
  std::vector<InstructionRef> instruction_pool;
  std::uint64_t seed = 0;

  friend bool operator==(const SynthesisManifest&, const SynthesisManifest&) = default;
};

}  // namespace vclip
