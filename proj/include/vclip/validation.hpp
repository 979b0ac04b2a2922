#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vclip/types.hpp"

namespace vclip {

/// Violated invariants, one human-readable line each. Empty means valid.
using ValidationReport = std::vector<std::string>;

/// Norm tolerance applied to rows of packs flagged as normalized.
inline constexpr double kUnitNormTolerance = 1e-4;

ValidationReport validate_pack(const FeaturePack& pack);

/// Checks that `seg` partitions [0, frame_count) into non-empty contiguous
/// clips and that every recorded center lies inside the range.
ValidationReport validate_segmentation(const Segmentation& seg, std::size_t frame_count);

/// Checks ranking order, chronology of the selected frames, the budget, and
/// that every selected frame belongs to a ranked clip of `seg`.
ValidationReport validate_result(const RetrievalResult& result, const Segmentation& seg);

ValidationReport validate_manifest(const SynthesisManifest& manifest);

/// Throws InvalidArgument carrying the first line of a non-empty report.
void throw_if_invalid(const ValidationReport& report, const std::string& context);

}  // namespace vclip
