#pragma once

// Run configuration file: one `key = value` per line, `#` starts a comment.
//
//   num_clips    = 32            positive integer
//   top_k        = 8             positive integer
//   frame_budget = 16            positive integer
//   temperature  = 0.07          positive real
//   seed         = 0             unsigned integer
//   strategy     = all           all | comma list of bench strategies
//
// Unknown keys, repeated keys and malformed values are rejected.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace vclip {

struct RunConfig {
  std::optional<std::size_t> num_clips;
  std::optional<std::size_t> top_k;
  std::optional<std::size_t> frame_budget;
  std::optional<double> temperature;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;

  /// Fields set in `overrides` win.
  RunConfig merged_with(const RunConfig& overrides) const;
};

/// Throws InvalidArgument naming the offending line.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace vclip
