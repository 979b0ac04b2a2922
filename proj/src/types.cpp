#include "vclip/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vclip/error.hpp"

namespace vclip {

FeaturePack::FeaturePack(std::string video_id, std::size_t dim, std::vector<double> timestamps,
                         std::vector<float> features, bool normalized)
    : video_id_(std::move(video_id)),
      dim_(dim),
      timestamps_(std::move(timestamps)),
      features_(std::move(features)),
      normalized_(normalized) {
  if (features_.size() != timestamps_.size() * dim_) {
    throw InvalidArgument("feature matrix has " + std::to_string(features_.size()) +
                          " values, expected count*dim = " +
                          std::to_string(timestamps_.size()) + "*" + std::to_string(dim_));
  }
}

SimilaritySeries::SimilaritySeries(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < -1.0 - kSlack || v > 1.0 + kSlack) {
      throw InvalidArgument("similarity at frame " + std::to_string(i) + " is outside [-1, 1]: " +
                            std::to_string(v));
    }
  }
}

std::size_t Segmentation::clip_of(std::size_t frame) const noexcept {
  // Clips are sorted by start; find the last clip starting at or before frame.
  auto it = std::upper_bound(clips.begin(), clips.end(), frame,
                             [](std::size_t f, const ClipRange& c) { return f < c.start; });
  if (it == clips.begin()) return clips.size();
  --it;
  return it->contains(frame) ? static_cast<std::size_t>(it - clips.begin()) : clips.size();
}

std::string_view to_string(ChunkMethod method) noexcept {
  switch (method) {
    case ChunkMethod::kUniform:
      return "uniform";
    case ChunkMethod::kScene:
      return "scene";
    case ChunkMethod::kQueryGuided:
      return "query_guided";
  }
  return "unknown";
}

ChunkMethod parse_chunk_method(std::string_view name) {
  if (name == "uniform") return ChunkMethod::kUniform;
  if (name == "scene") return ChunkMethod::kScene;
  if (name == "query_guided") return ChunkMethod::kQueryGuided;
  throw InvalidArgument("unknown chunk method '" + std::string(name) +
                        "' (expected uniform, scene or query_guided)");
}

std::string_view to_string(LossMode mode) noexcept {
  return mode == LossMode::kCoarse ? "coarse" : "fine";
}

LossMode parse_loss_mode(std::string_view name) {
  if (name == "coarse") return LossMode::kCoarse;
  if (name == "fine") return LossMode::kFine;
  throw InvalidArgument("unknown mode '" + std::string(name) + "' (expected coarse or fine)");
}

}  // namespace vclip
