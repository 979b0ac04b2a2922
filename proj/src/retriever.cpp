#include "vclip/retriever.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "vclip/error.hpp"
#include "vclip/validation.hpp"

namespace vclip {

namespace {

// Frames start + floor(i * size / count) for i in [0, count).
void take_strided(const ClipRange& clip, std::size_t count, std::vector<std::size_t>& out) {
  for (std::size_t i = 0; i < count; ++i) out.push_back(clip.start + i * clip.size() / count);
}

}  // namespace

std::vector<double> clip_relevance(const SimilaritySeries& series, const Segmentation& seg) {
  throw_if_invalid(validate_segmentation(seg, series.size()), "segmentation does not fit series");
  std::vector<double> relevances;
  relevances.reserve(seg.n());
  const auto s = series.values();
  for (const auto& clip : seg.clips) {
    relevances.push_back(*std::max_element(s.begin() + static_cast<std::ptrdiff_t>(clip.start),
                                           s.begin() + static_cast<std::ptrdiff_t>(clip.end)));
  }
  return relevances;
}

std::vector<RankedClip> top_k_clips(std::span<const double> relevances, std::size_t top_k) {
  if (top_k == 0) throw InvalidArgument("top_k must be positive");
  if (top_k > relevances.size()) {
    throw InvalidArgument("top_k K=" + std::to_string(top_k) + " exceeds clip count n=" +
                          std::to_string(relevances.size()));
  }
  std::vector<std::size_t> order(relevances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top_k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return relevances[a] > relevances[b] || (relevances[a] == relevances[b] && a < b);
                    });
  std::vector<RankedClip> ranked;
  ranked.reserve(top_k);
  for (std::size_t i = 0; i < top_k; ++i) ranked.push_back({order[i], relevances[order[i]]});
  return ranked;
}

std::vector<std::size_t> allocate_frames(std::span<const std::size_t> clips,
                                         const Segmentation& seg, std::size_t budget) {
  if (clips.empty()) throw InvalidArgument("no clips selected for frame allocation");
  if (budget == 0) throw InvalidArgument("frame budget must be positive");
  for (std::size_t c : clips) {
    if (c >= seg.n()) throw InvalidArgument("selected clip " + std::to_string(c) + " out of range");
  }

  std::vector<std::size_t> chosen(clips.begin(), clips.end());
  if (budget < chosen.size()) chosen.resize(budget);
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());

  std::size_t total = 0;
  for (std::size_t c : chosen) total += seg.clips[c].size();

  std::vector<std::size_t> frames;
  frames.reserve(std::min(total, budget));
  if (total <= budget) {
    for (std::size_t c : chosen) {
      for (std::size_t f = seg.clips[c].start; f < seg.clips[c].end; ++f) frames.push_back(f);
    }
    return frames;
  }

  // Proportional shares with a one-frame floor, then settle the rounding so
  // the shares sum to exactly `budget`.
  const std::size_t k = chosen.size();
  std::vector<std::size_t> share(k);
  std::vector<std::size_t> remainder(k);  // numerator of the fractional part
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t size = seg.clips[chosen[i]].size();
    share[i] = std::max<std::size_t>(1, budget * size / total);
    remainder[i] = budget * size % total;
    assigned += share[i];
  }
  while (assigned > budget) {
    // Take from the largest share above the floor, later clip on ties.
    std::size_t victim = k;
    for (std::size_t i = 0; i < k; ++i) {
      if (share[i] > 1 && (victim == k || share[i] >= share[victim])) victim = i;
    }
    --share[victim];
    --assigned;
  }
  while (assigned < budget) {
    std::size_t pick = k;
    for (std::size_t i = 0; i < k; ++i) {
      if (share[i] >= seg.clips[chosen[i]].size()) continue;
      if (pick == k || remainder[i] > remainder[pick]) pick = i;
    }
    ++share[pick];
    remainder[pick] = 0;
    ++assigned;
  }

  for (std::size_t i = 0; i < k; ++i) take_strided(seg.clips[chosen[i]], share[i], frames);
  return frames;
}

RetrievalResult retrieve(const SimilaritySeries& series, const Segmentation& seg,
                         const RetrievalConfig& cfg) {
  const auto relevances = clip_relevance(series, seg);
  RetrievalResult result;
  result.budget = cfg.frame_budget;
  result.ranked_clips = top_k_clips(relevances, cfg.top_k);
  std::vector<std::size_t> ranked_ids;
  ranked_ids.reserve(result.ranked_clips.size());
  for (const auto& rc : result.ranked_clips) ranked_ids.push_back(rc.clip);
  result.selected_frames = allocate_frames(ranked_ids, seg, cfg.frame_budget);
  return result;
}

PipelineOutput run_pipeline(const FeaturePack& pack, std::span<const float> query,
                            const ChunkConfig& chunk_cfg, const RetrievalConfig& retrieval_cfg,
                            const SimilarityFn& similarity) {
  PipelineOutput out;
  out.series = similarity(pack, query);
  if (out.series.size() != pack.count()) {
    throw InvalidArgument("similarity backend returned " + std::to_string(out.series.size()) +
                          " values for " + std::to_string(pack.count()) + " frames");
  }
  out.segmentation = chunk(out.series, chunk_cfg);
  out.result = retrieve(out.series, out.segmentation, retrieval_cfg);
  return out;
}

}  // namespace vclip
