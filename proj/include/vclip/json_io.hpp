#pragma once

// JSON encodings of the pipeline outputs. Objects use nlohmann::json's
// default ordered map, so keys are always emitted sorted.

#include <span>
#include <string>

#include <json.hpp>

#include "vclip/types.hpp"

namespace vclip {

using Json = nlohmann::json;

/// {"centers", "clips": [[start, end], ...], "method", "n", "video_id"}
Json segmentation_to_json(const Segmentation& seg, const std::string& video_id);
/// Inverse of segmentation_to_json; throws FormatError on a bad shape.
Segmentation segmentation_from_json(const Json& doc);

/// {"frames", "query_id", "ranked_clips": [{"clip", "r"}], "video_id"}
Json result_to_json(const RetrievalResult& result, const std::string& query_id,
                    const std::string& video_id);

Json manifest_to_json(const SynthesisManifest& manifest);
Json manifests_to_json(std::span<const SynthesisManifest> manifests);

/// {"mode", "neg": [{"clip", "video"}], "pos": {"clip", "video"}, "query_id"}
/// plus "loss" when computed.
Json pair_to_json(const MinedPair& pair);
/// One compact object per line.
std::string format_pairs_jsonl(std::span<const MinedPair> pairs);

/// Two-space indentation with a trailing newline.
std::string dump_pretty(const Json& doc);

}  // namespace vclip
