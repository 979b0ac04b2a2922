#include "vclip/validation.hpp"

#include <cmath>
#include <set>
#include <string>

#include "vclip/error.hpp"

namespace vclip {

ValidationReport validate_pack(const FeaturePack& pack) {
  ValidationReport report;
  if (pack.dim() == 0) report.emplace_back("dim must be positive");
  if (pack.count() == 0) report.emplace_back("count must be positive");

  const auto ts = pack.timestamps();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!std::isfinite(ts[i]) || ts[i] < 0.0) {
      report.push_back("timestamp " + std::to_string(i) + " is negative or non-finite");
      break;
    }
  }
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (!(ts[i] > ts[i - 1])) {
      report.push_back("timestamps not strictly increasing at frame " + std::to_string(i));
      break;
    }
  }

  if (pack.dim() == 0) return report;
  bool reported_finite = false;
  bool reported_norm = false;
  for (std::size_t i = 0; i < pack.count(); ++i) {
    double norm2 = 0.0;
    bool finite = true;
    for (float v : pack.row(i)) {
      if (!std::isfinite(v)) finite = false;
      norm2 += static_cast<double>(v) * static_cast<double>(v);
    }
    if (!finite && !reported_finite) {
      report.push_back("non-finite value in row " + std::to_string(i));
      reported_finite = true;
    }
    if (finite && pack.normalized() && !reported_norm &&
        std::abs(std::sqrt(norm2) - 1.0) > kUnitNormTolerance) {
      report.push_back("row norm violation at row " + std::to_string(i) + " (norm " +
                       std::to_string(std::sqrt(norm2)) + ")");
      reported_norm = true;
    }
  }
  return report;
}

ValidationReport validate_segmentation(const Segmentation& seg, std::size_t frame_count) {
  ValidationReport report;
  if (seg.clips.empty()) {
    report.emplace_back("segmentation has no clips");
    return report;
  }
  if (seg.clips.front().start != 0) report.emplace_back("first clip does not start at 0");
  if (seg.clips.back().end != frame_count) {
    report.push_back("last clip ends at " + std::to_string(seg.clips.back().end) +
                     ", expected " + std::to_string(frame_count));
  }
  for (std::size_t i = 0; i < seg.clips.size(); ++i) {
    if (seg.clips[i].end <= seg.clips[i].start) {
      report.push_back("clip " + std::to_string(i) + " is empty");
    }
    if (i + 1 < seg.clips.size() && seg.clips[i].end != seg.clips[i + 1].start) {
      report.push_back("clips " + std::to_string(i) + " and " + std::to_string(i + 1) +
                       " are not contiguous");
    }
  }
  for (std::size_t i = 0; i < seg.centers.size(); ++i) {
    if (seg.centers[i] >= frame_count) {
      report.push_back("center " + std::to_string(seg.centers[i]) + " is out of range");
    } else if (i > 0 && seg.centers[i] <= seg.centers[i - 1]) {
      report.emplace_back("centers not strictly increasing");
    }
  }
  return report;
}

ValidationReport validate_result(const RetrievalResult& result, const Segmentation& seg) {
  ValidationReport report;
  if (result.budget == 0) report.emplace_back("budget must be positive");
  if (result.ranked_clips.size() > seg.n()) report.emplace_back("more ranked clips than clips");
  std::set<std::size_t> ranked;
  for (std::size_t i = 0; i < result.ranked_clips.size(); ++i) {
    const auto& rc = result.ranked_clips[i];
    if (rc.clip >= seg.n()) report.push_back("ranked clip " + std::to_string(rc.clip) + " out of range");
    if (!ranked.insert(rc.clip).second) report.push_back("clip " + std::to_string(rc.clip) + " ranked twice");
    if (i > 0 && rc.relevance > result.ranked_clips[i - 1].relevance) {
      report.emplace_back("relevances not non-increasing");
    }
  }
  if (result.selected_frames.size() > result.budget) report.emplace_back("selected frames exceed budget");
  for (std::size_t i = 0; i < result.selected_frames.size(); ++i) {
    const std::size_t f = result.selected_frames[i];
    if (i > 0 && f <= result.selected_frames[i - 1]) {
      report.emplace_back("selected frames not strictly increasing");
      break;
    }
    if (!ranked.contains(seg.clip_of(f))) {
      report.push_back("frame " + std::to_string(f) + " is outside the ranked clips");
      break;
    }
  }
  return report;
}

ValidationReport validate_manifest(const SynthesisManifest& manifest) {
  ValidationReport report;
  std::set<std::string> seen;
  std::size_t anchors = 0;
  for (const auto& id : manifest.components) {
    if (!seen.insert(id).second) report.push_back("duplicate component " + id);
    if (id == manifest.anchor_id) ++anchors;
  }
  if (anchors != 1) report.emplace_back("anchor must appear exactly once among components");
  if (manifest.anchor_position >= manifest.components.size() ||
      manifest.components[manifest.anchor_position] != manifest.anchor_id) {
    report.emplace_back("anchor_position does not point at the anchor");
  }
  return report;
}

void throw_if_invalid(const ValidationReport& report, const std::string& context) {
  if (!report.empty()) throw InvalidArgument(context + ": " + report.front());
}

}  // namespace vclip
