// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Thresholds are fixed here and must not be relaxed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"
#include "vclip/chunker.hpp"
#include "vclip/contrastive.hpp"
#include "vclip/error.hpp"
#include "vclip/evalbench.hpp"
#include "vclip/feature_io.hpp"
#include "vclip/json_io.hpp"
#include "vclip/retriever.hpp"
#include "vclip/synthesizer.hpp"
#include "vclip/validation.hpp"

using namespace vclip;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome boundary_oracle() {
  std::mt19937_64 rng(20240601);
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t tj = 2 + rng() % 63;  // [2, 64]
    const auto gap = oracle::uniform_series(rng, tj + 1);
    const auto got = optimal_boundary(gap);
    if (!got || *got != oracle::exhaustive_boundary(gap)) ++mismatches;
  }
  const double elapsed = seconds_since(t0);
  return {mismatches == 0 && elapsed < 5.0, fmt("%zu/1000 mismatches, %.4f s (limit 5 s)", mismatches, elapsed)};
}

Outcome peak_score_oracle() {
  std::mt19937_64 rng(20240602);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = oracle::uniform_series(rng, 1 + rng() % 128);
    if (peak_scores(s) != oracle::peak_scores(s)) ++mismatches;
  }
  return {mismatches == 0, fmt("%zu/1000 series differ (exact comparison)", mismatches)};
}

Outcome partition_fuzz() {
  std::mt19937_64 rng(20240603);
  std::size_t violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t t = 1 + rng() % 400;
    const std::size_t n = 1 + rng() % t;
    const auto seg = chunk(SimilaritySeries(oracle::uniform_series(rng, t)), {n});
    bool ok = validate_segmentation(seg, t).empty() && seg.n() == n && seg.centers.size() == n;
    for (std::size_t i = 0; ok && i < n; ++i) ok = seg.clips[i].contains(seg.centers[i]);
    if (!ok) ++violations;
  }
  return {violations == 0, fmt("%zu violations in 10000 calls", violations)};
}

Outcome gradient_check() {
  std::mt19937_64 rng(20240604);
  std::uniform_real_distribution<double> sim(-1.0, 1.0);
  std::uniform_real_distribution<double> log_tau(std::log(0.05), std::log(1.0));
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    ContrastiveBatch b;
    b.temperature = std::exp(log_tau(rng));
    b.positive_similarities.resize(1 + rng() % 8);
    b.negative_similarities.resize(1 + rng() % 16);
    for (auto& s : b.positive_similarities) s = sim(rng);
    for (auto& s : b.negative_similarities) s = sim(rng);
    const auto g = loss_gradient(b);

    std::vector<double> analytic, numeric;
    for (std::size_t i = 0; i < b.positive_similarities.size(); ++i) {
      auto plus = b, minus = b;
      plus.positive_similarities[i] += h;
      minus.positive_similarities[i] -= h;
      analytic.push_back(g.positives[i]);
      numeric.push_back((contrastive_loss(plus) - contrastive_loss(minus)) / (2 * h));
    }
    for (std::size_t j = 0; j < b.negative_similarities.size(); ++j) {
      auto plus = b, minus = b;
      plus.negative_similarities[j] += h;
      minus.negative_similarities[j] -= h;
      analytic.push_back(g.negatives[j]);
      numeric.push_back((contrastive_loss(plus) - contrastive_loss(minus)) / (2 * h));
    }
    double diff2 = 0.0, na = 0.0, nn = 0.0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
      diff2 += (analytic[k] - numeric[k]) * (analytic[k] - numeric[k]);
      na += analytic[k] * analytic[k];
      nn += numeric[k] * numeric[k];
    }
    const double scale = std::sqrt(std::max(na, nn));
    const double rel = scale > 0.0 ? std::sqrt(diff2) / scale : std::sqrt(diff2);
    worst = std::max(worst, rel);
  }
  return {worst <= 1e-5, fmt("max relative error %.3e over 500 batches (limit 1e-5)", worst)};
}

Outcome loss_closed_forms() {
  const double balanced = contrastive_loss({{0.5}, {0.5}, 1.0, LossMode::kCoarse});
  const double empty = contrastive_loss({{0.3, 0.9}, {}, 0.07, LossMode::kFine});
  const double extreme = contrastive_loss({{30.0}, {-30.0}, 1.0, LossMode::kCoarse});
  const double flipped = contrastive_loss({{-1.0}, {1.0}, 1e-3, LossMode::kCoarse});
  const bool ok = balanced == std::numbers::ln2 && empty == 0.0 && std::isfinite(extreme) &&
                  std::isfinite(flipped) && std::abs(flipped - 2000.0) < 1e-9;
  return {ok, fmt("balanced %.17g (ln2 %.17g), no negatives %g, extreme %.4e and %.6f", balanced, std::numbers::ln2,
                  empty, extreme, flipped)};
}

Outcome planted_retrieval() {
  SyntheticSpec spec;
  spec.frame_count = 1000;
  spec.dim = 512;
  spec.segments = {{475, 525, 1.0}};
  spec.noise_std = 0.1;
  spec.seed = 1;
  const std::vector<Strategy> strategies{Strategy::kQueryGuided};
  const auto rows = compare_strategies(spec, strategies, {32}, {8, 16}, {500, true, 0});
  const auto& baseline = rows[0];
  const auto& guided = rows[1];
  const bool ok = guided.mean_clip_hit >= 0.95 && guided.mean_recall > baseline.mean_recall;
  return {ok, fmt("query-guided clip-hit %.4f (min 0.95), recall %.4f vs baseline %.4f (%.3f frames hit)",
                  guided.mean_clip_hit, guided.mean_recall, baseline.mean_recall, baseline.mean_recall * 50.0)};
}

Outcome latency_budget() {
  auto sample_of = [](std::size_t t) {
    SyntheticSpec spec;
    spec.frame_count = t;
    spec.dim = 512;
    spec.segments = {{t / 2, t / 2 + 30, 1.0}};
    spec.seed = 7;
    return generate(spec);
  };
  const auto a = sample_of(930);
  const auto ta = time_stages(a.pack, a.query, {32}, {8, 16}, 5);
  const auto b = sample_of(2466);
  const auto tb = time_stages(b.pack, b.query, {32}, {8, 16}, 5);
  const bool ok = ta.similarity < 0.050 && ta.chunking < 0.643 && ta.retrieval < 0.021 && tb.chunking < 1.737;
  return {ok, fmt("t=930: similarity %.3f ms, chunking %.3f ms, retrieval %.3f ms; t=2466: chunking %.3f ms",
                  ta.similarity * 1e3, ta.chunking * 1e3, ta.retrieval * 1e3, tb.chunking * 1e3)};
}

Outcome format_round_trip() {
  test::TempDir dir;
  std::mt19937_64 rng(20240605);
  std::size_t unstable = 0, accepted_corrupt = 0, wrong_message = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto pack = test::random_pack(rng, 1 + rng() % 200, 1 + rng() % 128, "p" + std::to_string(trial));
    const auto path = dir.path() / (pack.video_id() + ".ocfp");
    write_pack(pack, path);
    const auto first = read_file_bytes(path);
    write_pack(read_pack(path), path);
    if (read_file_bytes(path) != first) ++unstable;

    // Flip one byte anywhere after the size fields.
    auto bytes = first;
    const std::size_t at = 16 + rng() % (bytes.size() - 16);
    bytes[at] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    const auto bad = dir.path() / ("bad" + std::to_string(trial) + ".ocfp");
    {
      std::FILE* f = std::fopen(bad.c_str(), "wb");
      std::fwrite(bytes.data(), 1, bytes.size(), f);
      std::fclose(f);
    }
    try {
      read_pack(bad);
      ++accepted_corrupt;
    } catch (const FormatError& e) {
      if (std::string(e.what()).find("corrupt pack") == std::string::npos) ++wrong_message;
    } catch (const Error&) {
      ++wrong_message;
    }
  }
  const bool ok = unstable == 0 && accepted_corrupt == 0 && wrong_message == 0;
  return {ok, fmt("100 packs: %zu unstable rewrites, %zu corrupt accepted, %zu without \"corrupt pack\"", unstable,
                  accepted_corrupt, wrong_message)};
}

Outcome synthesis_procedure() {
  std::size_t bad_lists = 0, bad_retained = 0, missing_dups = 0, decoys_kept = 0, decoy_checks = 0, unstable = 0;
  for (std::uint64_t corpus_seed = 0; corpus_seed < 20; ++corpus_seed) {
    std::mt19937_64 rng(900 + corpus_seed);
    const auto planted = test::planted_corpus(rng, 50, 32, 8, 8);
    const auto& corpus = planted.entries;
    const auto candidates = build_candidates(corpus);
    const auto manifests = plan_synthesis(corpus, candidates, {corpus_seed});
    for (std::size_t a = 0; a < corpus.size(); ++a) {
      if (candidates[a].size() != 16) ++bad_lists;
      const auto& comps = manifests[a].components;
      const std::set<std::string> unique(comps.begin(), comps.end());
      if (comps.size() != 9 || unique.size() != 9 || comps[manifests[a].anchor_position] != corpus[a].video_id) {
        ++bad_retained;
      }
    }
    auto in_candidates = [&](std::size_t a, std::size_t j) {
      return std::any_of(candidates[a].begin(), candidates[a].end(), [&](const Candidate& c) { return c.index == j; });
    };
    for (auto [anchor, dup] : planted.duplicates) {
      if (!in_candidates(anchor, dup)) ++missing_dups;
    }
    for (auto [anchor, decoy] : planted.decoys) {
      std::size_t divergent = 0;
      for (const auto& c : candidates[anchor]) {
        if (instruction_divergence(corpus[anchor], corpus[c.index]) > 0.0) ++divergent;
      }
      if (divergent < 8) continue;
      ++decoy_checks;
      const auto& comps = manifests[anchor].components;
      if (std::find(comps.begin(), comps.end(), corpus[decoy].video_id) != comps.end()) ++decoys_kept;
    }
    const auto again = plan_synthesis(corpus, build_candidates(corpus), {corpus_seed});
    if (dump_pretty(manifests_to_json(again)) != dump_pretty(manifests_to_json(manifests))) ++unstable;
  }
  const bool ok = bad_lists == 0 && bad_retained == 0 && missing_dups == 0 && decoys_kept == 0 && decoy_checks > 0 &&
                  unstable == 0;
  return {ok, fmt("20 corpora x 50 videos: %zu bad candidate lists, %zu bad manifests, %zu duplicates missed, "
                  "%zu/%zu decoys retained, %zu unstable reruns",
                  bad_lists, bad_retained, missing_dups, decoys_kept, decoy_checks, unstable)};
}

Outcome one_shot() {
  std::mt19937_64 rng(20240606);
  std::size_t pairs = 0, wrong_counts = 0, mismatched = 0;
  for (int video = 0; video < 10; ++video) {
    const auto pack = test::random_pack(rng, 100 + rng() % 300, 32, "v" + std::to_string(video));
    for (int query = 0; query < 10; ++query) {
      const auto row = pack.row(rng() % pack.count());
      const std::vector<float> q(row.begin(), row.end());
      int calls = 0;
      SimilarityFn counting = [&](const FeaturePack& p, std::span<const float> e) {
        ++calls;
        return similarity_series(p, e);
      };
      const auto out = run_pipeline(pack, q, {16}, {4, 12}, counting);
      ++pairs;
      if (calls != 1) ++wrong_counts;
      const auto series = similarity_series(pack, q);
      const auto seg = chunk(series, {16});
      if (!(seg == out.segmentation) || !(retrieve(series, seg, {4, 12}) == out.result)) ++mismatched;
    }
  }
  return {wrong_counts == 0 && mismatched == 0,
          fmt("%zu (video, query) pairs: %zu with other than one similarity call, %zu differing from a manual run",
              pairs, wrong_counts, mismatched)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"boundary oracle equivalence", boundary_oracle},
      {"peak-score oracle equivalence", peak_score_oracle},
      {"partition fuzz", partition_fuzz},
      {"gradient check", gradient_check},
      {"loss closed forms", loss_closed_forms},
      {"planted-segment retrieval", planted_retrieval},
      {"latency budget", latency_budget},
      {"format round-trip", format_round_trip},
      {"synthesis procedure", synthesis_procedure},
      {"one-shot similarity", one_shot},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s  %-30s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
