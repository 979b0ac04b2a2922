#pragma once

// Feature pack binary format ("OCFP", version 1), all fields little-endian:
//
//   offset  size            field
//   0       4               magic "OCFP"
//   4       4               version (u32) = 1
//   8       4               dim (u32)
//   12      4               count (u32)
//   16      4               flags (u32), bit 0 = rows L2-normalized
//   20      8*count         timestamps (f64)
//   ...     4*count*dim     features (f32, row-major)
//   ...     8               FNV-1a 64 over every preceding byte (u64)

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vclip/types.hpp"

namespace vclip {

inline constexpr char kPackMagic[4] = {'O', 'C', 'F', 'P'};
inline constexpr std::uint32_t kPackVersion = 1;
inline constexpr std::uint32_t kFlagNormalized = 1u;
inline constexpr std::size_t kPackHeaderSize = 20;
inline constexpr std::size_t kPackChecksumSize = 8;

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

std::size_t pack_file_size(std::size_t count, std::size_t dim) noexcept;

/// Serializes a pack. Throws InvalidArgument if the pack fails validate_pack
/// or does not fit the u32 header fields.
std::vector<std::uint8_t> encode_pack(const FeaturePack& pack);

/// Decodes and validates a pack. The format carries no id, so the caller
/// supplies one. Throws FormatError for undecodable bytes and
/// InvalidArgument for decodable packs that break an invariant.
FeaturePack decode_pack(std::span<const std::uint8_t> bytes, std::string video_id);

/// Returns the number of bytes written. Throws IoError naming the path.
std::size_t write_pack(const FeaturePack& pack, const std::filesystem::path& path);

/// The pack's video_id is the file stem.
FeaturePack read_pack(const std::filesystem::path& path);

/// One JSON object per line; blank lines are skipped. Embedding lengths must
/// agree across the file.
std::vector<QueryRecord> parse_queries(const std::string& jsonl);
std::vector<QueryRecord> read_queries(const std::filesystem::path& path);
std::string format_queries(std::span<const QueryRecord> queries);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename so readers never see partial output.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace vclip
