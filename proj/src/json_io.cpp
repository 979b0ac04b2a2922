#include "vclip/json_io.hpp"

#include "vclip/error.hpp"

namespace vclip {

namespace {

Json range_to_json(const ClipRange& r) { return Json::array({r.start, r.end}); }

Json clip_ref_to_json(const ClipRef& ref) {
  return Json{{"video", ref.video_id}, {"clip", range_to_json(ref.clip)}};
}

[[noreturn]] void bad_shape(const std::string& what) {
  throw FormatError(FormatError::Kind::kMalformedJson, "malformed segmentation: " + what);
}

}  // namespace

Json segmentation_to_json(const Segmentation& seg, const std::string& video_id) {
  Json clips = Json::array();
  for (const auto& c : seg.clips) clips.push_back(range_to_json(c));
  return Json{{"video_id", video_id},
              {"method", std::string(to_string(seg.method))},
              {"n", seg.n()},
              {"clips", std::move(clips)},
              {"centers", seg.centers}};
}

Segmentation segmentation_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("clips") || !doc["clips"].is_array()) {
    bad_shape("expected an object with a \"clips\" array");
  }
  Segmentation seg;
  try {
    if (doc.contains("method")) seg.method = parse_chunk_method(doc["method"].get<std::string>());
    for (const auto& c : doc["clips"]) {
      if (!c.is_array() || c.size() != 2) bad_shape("clip must be [start, end]");
      seg.clips.push_back({c[0].get<std::size_t>(), c[1].get<std::size_t>()});
    }
    if (doc.contains("centers")) seg.centers = doc["centers"].get<std::vector<std::size_t>>();
  } catch (const Json::exception& e) {
    bad_shape(e.what());
  }
  if (doc.contains("n") && doc["n"] != seg.n()) bad_shape("\"n\" disagrees with the clip count");
  return seg;
}

Json result_to_json(const RetrievalResult& result, const std::string& query_id,
                    const std::string& video_id) {
  Json ranked = Json::array();
  for (const auto& rc : result.ranked_clips) ranked.push_back({{"clip", rc.clip}, {"r", rc.relevance}});
  return Json{{"query_id", query_id},
              {"video_id", video_id},
              {"ranked_clips", std::move(ranked)},
              {"frames", result.selected_frames}};
}

Json manifest_to_json(const SynthesisManifest& manifest) {
  Json pool = Json::array();
  for (const auto& ref : manifest.instruction_pool) {
    pool.push_back({{"query_id", ref.query_id}, {"source_video_id", ref.source_video_id}});
  }
  return Json{{"anchor_id", manifest.anchor_id},
              {"anchor_position", manifest.anchor_position},
              {"components", manifest.components},
              {"instruction_pool", std::move(pool)},
              {"seed", manifest.seed}};
}

Json manifests_to_json(std::span<const SynthesisManifest> manifests) {
  Json out = Json::array();
  for (const auto& m : manifests) out.push_back(manifest_to_json(m));
  return out;
}

Json pair_to_json(const MinedPair& pair) {
  Json neg = Json::array();
  for (const auto& n : pair.negatives) neg.push_back(clip_ref_to_json(n));
  Json out{{"query_id", pair.query_id},
           {"mode", std::string(to_string(pair.mode))},
           {"pos", clip_ref_to_json(pair.positive)},
           {"neg", std::move(neg)}};
  if (pair.loss) out["loss"] = *pair.loss;
  return out;
}

std::string format_pairs_jsonl(std::span<const MinedPair> pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += pair_to_json(p).dump();
    out += '\n';
  }
  return out;
}

std::string dump_pretty(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace vclip
