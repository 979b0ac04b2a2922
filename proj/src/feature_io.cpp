#include "vclip/feature_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "vclip/error.hpp"
#include "vclip/validation.hpp"

namespace vclip {

namespace {

template <typename U>
void put_le(std::vector<std::uint8_t>& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename U>
U get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    value |= static_cast<U>(bytes[offset + i]) << (8 * i);
  }
  return value;
}

FormatError unexpected_end(std::size_t have, std::size_t need) {
  return FormatError(FormatError::Kind::kUnexpectedEnd,
                     "unexpected end: file has " + std::to_string(have) + " bytes, layout needs " +
                         std::to_string(need));
}

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    hash ^= b;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::size_t pack_file_size(std::size_t count, std::size_t dim) noexcept {
  return kPackHeaderSize + 8 * count + 4 * count * dim + kPackChecksumSize;
}

std::vector<std::uint8_t> encode_pack(const FeaturePack& pack) {
  throw_if_invalid(validate_pack(pack), "cannot write pack '" + pack.video_id() + "'");
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (pack.dim() > kMax || pack.count() > kMax) {
    throw InvalidArgument("pack dimensions exceed the 32-bit header fields");
  }

  std::vector<std::uint8_t> out;
  out.reserve(pack_file_size(pack.count(), pack.dim()));
  out.insert(out.end(), std::begin(kPackMagic), std::end(kPackMagic));
  put_le<std::uint32_t>(out, kPackVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(pack.dim()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(pack.count()));
  put_le<std::uint32_t>(out, pack.normalized() ? kFlagNormalized : 0u);
  for (double t : pack.timestamps()) put_le(out, std::bit_cast<std::uint64_t>(t));
  for (float f : pack.features()) put_le(out, std::bit_cast<std::uint32_t>(f));
  put_le(out, fnv1a64(out));
  return out;
}

FeaturePack decode_pack(std::span<const std::uint8_t> bytes, std::string video_id) {
  if (bytes.size() < sizeof(kPackMagic)) throw unexpected_end(bytes.size(), kPackHeaderSize);
  if (std::memcmp(bytes.data(), kPackMagic, sizeof(kPackMagic)) != 0) {
    throw FormatError(FormatError::Kind::kNotAFeaturePack, "not a feature pack: bad magic");
  }
  if (bytes.size() < kPackHeaderSize + kPackChecksumSize) {
    throw unexpected_end(bytes.size(), kPackHeaderSize + kPackChecksumSize);
  }
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kPackVersion) {
    throw FormatError(FormatError::Kind::kUnsupportedVersion,
                      "unsupported pack version " + std::to_string(version));
  }
  const std::size_t dim = get_le<std::uint32_t>(bytes, 8);
  const std::size_t count = get_le<std::uint32_t>(bytes, 12);
  const auto flags = get_le<std::uint32_t>(bytes, 16);

  const std::size_t expected = pack_file_size(count, dim);
  if (bytes.size() < expected) throw unexpected_end(bytes.size(), expected);
  if (bytes.size() > expected) {
    throw FormatError(FormatError::Kind::kCorrupt,
                      "corrupt pack: " + std::to_string(bytes.size() - expected) +
                          " trailing bytes after checksum");
  }
  const std::size_t body = expected - kPackChecksumSize;
  if (fnv1a64(bytes.first(body)) != get_le<std::uint64_t>(bytes, body)) {
    throw FormatError(FormatError::Kind::kCorrupt, "corrupt pack: checksum mismatch");
  }
  if ((flags & ~kFlagNormalized) != 0) {
    throw FormatError(FormatError::Kind::kCorrupt,
                      "corrupt pack: unknown flag bits " + std::to_string(flags));
  }

  std::vector<double> timestamps(count);
  std::size_t offset = kPackHeaderSize;
  for (auto& t : timestamps) {
    t = std::bit_cast<double>(get_le<std::uint64_t>(bytes, offset));
    offset += 8;
  }
  std::vector<float> features(count * dim);
  for (auto& f : features) {
    f = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
    offset += 4;
  }

  FeaturePack pack(std::move(video_id), dim, std::move(timestamps), std::move(features),
                   (flags & kFlagNormalized) != 0);
  throw_if_invalid(validate_pack(pack), "invalid pack '" + pack.video_id() + "'");
  return pack;
}

std::size_t write_pack(const FeaturePack& pack, const std::filesystem::path& path) {
  const auto bytes = encode_pack(pack);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
  return bytes.size();
}

FeaturePack read_pack(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_pack(bytes, path.stem().string());
  } catch (const FormatError& e) {
    throw FormatError(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<QueryRecord> parse_queries(const std::string& jsonl) {
  std::vector<QueryRecord> records;
  std::istringstream in(jsonl);
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> embedding_dim;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "query file line " + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(FormatError::Kind::kMalformedJson, where + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("query_id") || !obj["query_id"].is_string()) {
      throw FormatError(FormatError::Kind::kMalformedJson, where + ": missing string \"query_id\"");
    }
    QueryRecord rec;
    rec.query_id = obj["query_id"].get<std::string>();
    if (obj.contains("text")) {
      if (!obj["text"].is_string()) {
        throw FormatError(FormatError::Kind::kMalformedJson, where + ": \"text\" must be a string");
      }
      rec.text = obj["text"].get<std::string>();
    }
    if (obj.contains("embedding") && !obj["embedding"].is_null()) {
      const auto& emb = obj["embedding"];
      if (!emb.is_array()) {
        throw FormatError(FormatError::Kind::kMalformedJson, where + ": \"embedding\" must be an array");
      }
      std::vector<float> values;
      values.reserve(emb.size());
      for (const auto& v : emb) {
        if (!v.is_number()) {
          throw FormatError(FormatError::Kind::kMalformedJson, where + ": non-numeric embedding value");
        }
        values.push_back(v.get<float>());
      }
      if (embedding_dim && *embedding_dim != values.size()) {
        throw InvalidArgument(where + ": embedding has " + std::to_string(values.size()) +
                              " values but earlier lines have " + std::to_string(*embedding_dim));
      }
      embedding_dim = values.size();
      rec.embedding = std::move(values);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<QueryRecord> read_queries(const std::filesystem::path& path) {
  try {
    return parse_queries(read_text_file(path));
  } catch (const FormatError& e) {
    throw FormatError(e.kind(), path.string() + ": " + e.what());
  }
}

std::string format_queries(std::span<const QueryRecord> queries) {
  std::string out;
  for (const auto& q : queries) {
    nlohmann::json obj = {{"query_id", q.query_id}, {"text", q.text}};
    if (q.embedding) obj["embedding"] = *q.embedding;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return bytes;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move output into '" + path.string() + "': " + ec.message());
}

}  // namespace vclip
