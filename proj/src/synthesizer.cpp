#include "vclip/synthesizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vclip/error.hpp"
#include "vclip/feature_io.hpp"

namespace vclip {

namespace {

std::vector<double> average_pool(std::span<const float> rows, std::size_t dim) {
  std::vector<double> pooled(dim, 0.0);
  const std::size_t count = rows.size() / dim;
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t k = 0; k < dim; ++k) pooled[k] += rows[r * dim + k];
  }
  for (double& v : pooled) v /= static_cast<double>(count);
  return pooled;
}

double pooled_cosine(const std::vector<double>& a, const std::vector<double>& b, const std::string& what) {
  if (a.size() != b.size()) {
    throw InvalidArgument(what + ": dimension mismatch " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw InvalidArgument(what + ": pooled vector has zero norm");
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

struct Pooled {
  std::vector<double> visual;
  std::vector<double> instruction;
};

Pooled pool(const ShortVideoEntry& e) {
  check_entry(e);
  return {average_pool(e.frame_features, e.dim), average_pool(e.instruction_features, e.dim)};
}

}  // namespace

void check_entry(const ShortVideoEntry& entry) {
  const std::size_t expected = kSamplesPerVideo * entry.dim;
  if (entry.dim == 0) throw InvalidArgument("entry " + entry.video_id + ": dim must be positive");
  if (entry.frame_features.size() != expected || entry.instruction_features.size() != expected) {
    throw InvalidArgument("entry " + entry.video_id + ": expected " + std::to_string(kSamplesPerVideo) +
                          " frame rows and " + std::to_string(kSamplesPerVideo) + " instruction rows");
  }
  if (entry.instruction_ids.size() != kSamplesPerVideo) {
    throw InvalidArgument("entry " + entry.video_id + ": expected " + std::to_string(kSamplesPerVideo) +
                          " instruction ids");
  }
  auto finite = [](float v) { return std::isfinite(v); };
  if (!std::all_of(entry.frame_features.begin(), entry.frame_features.end(), finite) ||
      !std::all_of(entry.instruction_features.begin(), entry.instruction_features.end(), finite)) {
    throw InvalidArgument("entry " + entry.video_id + ": non-finite feature value");
  }
}

double visual_relevance(const ShortVideoEntry& a, const ShortVideoEntry& b) {
  return pooled_cosine(pool(a).visual, pool(b).visual, "visual relevance");
}

double instruction_divergence(const ShortVideoEntry& a, const ShortVideoEntry& b) {
  return 1.0 - pooled_cosine(pool(a).instruction, pool(b).instruction, "instruction divergence");
}

std::vector<std::vector<Candidate>> build_candidates(std::span<const ShortVideoEntry> corpus,
                                                     std::size_t per_video) {
  if (corpus.size() <= per_video) {
    throw InvalidArgument("corpus has " + std::to_string(corpus.size()) + " videos; at least " +
                          std::to_string(per_video + 1) + " are needed");
  }
  std::set<std::string> ids;
  std::vector<std::vector<double>> pooled;
  pooled.reserve(corpus.size());
  for (const auto& e : corpus) {
    if (!ids.insert(e.video_id).second) throw InvalidArgument("duplicate video id " + e.video_id);
    pooled.push_back(pool(e).visual);
  }

  const std::size_t n = corpus.size();
  std::vector<double> relevance(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      relevance[i * n + j] = relevance[j * n + i] = pooled_cosine(pooled[i], pooled[j], "visual relevance");
    }
  }

  std::vector<std::vector<Candidate>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> others;
    others.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    const double* row = &relevance[i * n];
    std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(per_video), others.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (row[a] != row[b]) return row[a] > row[b];
                        return corpus[a].video_id < corpus[b].video_id;
                      });
    for (std::size_t k = 0; k < per_video; ++k) out[i].push_back({others[k], row[others[k]]});
  }
  return out;
}

std::vector<SynthesisManifest> plan_synthesis(std::span<const ShortVideoEntry> corpus,
                                              std::span<const std::vector<Candidate>> candidates,
                                              const SynthesisConfig& cfg) {
  if (candidates.size() != corpus.size()) {
    throw InvalidArgument("candidate lists do not match the corpus size");
  }
  std::vector<std::vector<double>> instruction_pooled;
  instruction_pooled.reserve(corpus.size());
  for (const auto& e : corpus) instruction_pooled.push_back(pool(e).instruction);

  std::vector<SynthesisManifest> manifests;
  manifests.reserve(corpus.size());
  for (std::size_t a = 0; a < corpus.size(); ++a) {
    const auto& cands = candidates[a];
    if (cands.size() < cfg.retained_negatives) {
      throw InvalidArgument("anchor " + corpus[a].video_id + " has " + std::to_string(cands.size()) +
                            " candidates, fewer than the " + std::to_string(cfg.retained_negatives) +
                            " negatives to retain");
    }
    std::vector<std::pair<double, std::size_t>> ranked;  // (divergence, corpus index)
    ranked.reserve(cands.size());
    for (const auto& c : cands) {
      if (c.index >= corpus.size() || c.index == a) {
        throw InvalidArgument("invalid candidate for anchor " + corpus[a].video_id);
      }
      ranked.push_back({1.0 - pooled_cosine(instruction_pooled[a], instruction_pooled[c.index],
                                            "instruction divergence"),
                        c.index});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });

    std::vector<std::size_t> members{a};
    for (std::size_t k = 0; k < cfg.retained_negatives; ++k) members.push_back(ranked[k].second);

    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(a)};
    std::mt19937_64 rng(seq);
    std::shuffle(members.begin(), members.end(), rng);

    SynthesisManifest m;
    m.anchor_id = corpus[a].video_id;
    m.seed = cfg.seed;
    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      const auto& entry = corpus[members[pos]];
      if (members[pos] == a) m.anchor_position = pos;
      m.components.push_back(entry.video_id);
      for (const auto& qid : entry.instruction_ids) m.instruction_pool.push_back({qid, entry.video_id});
    }
    manifests.push_back(std::move(m));
  }
  return manifests;
}

std::vector<ShortVideoEntry> read_short_video_index(const std::filesystem::path& index) {
  const auto base = index.parent_path();
  std::istringstream in(read_text_file(index));
  std::vector<ShortVideoEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = index.string() + " line " + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
      ShortVideoEntry e;
      e.video_id = obj.at("video_id").get<std::string>();
      e.instruction_ids = obj.at("instruction_ids").get<std::vector<std::string>>();
      const auto frames = read_pack(base / obj.at("frames").get<std::string>());
      const auto instructions = read_pack(base / obj.at("instructions").get<std::string>());
      if (frames.dim() != instructions.dim()) {
        throw InvalidArgument(where + ": frame and instruction packs differ in dim");
      }
      e.dim = frames.dim();
      e.frame_features.assign(frames.features().begin(), frames.features().end());
      e.instruction_features.assign(instructions.features().begin(), instructions.features().end());
      check_entry(e);
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(FormatError::Kind::kMalformedJson, where + ": " + e.what());
    }
  }
  return entries;
}

}  // namespace vclip
