#include "vclip/evalbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <thread>

#include "vclip/error.hpp"

namespace vclip {

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

constexpr std::uint32_t kStreamFeatures = 1;
constexpr std::uint32_t kStreamPlacement = 2;

void normalize_into(const std::vector<double>& v, float* out) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] * inv);
}

std::vector<double> gaussian_vector(std::size_t dim, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  for (double& x : v) x = scale * normal(rng);
  return v;
}

std::vector<PlantedSegment> random_placement(const SyntheticSpec& spec, std::uint64_t seed) {
  auto rng = make_rng(seed, kStreamPlacement);
  std::vector<PlantedSegment> placed;
  for (const auto& seg : spec.segments) {
    const std::size_t len = seg.end - seg.start;
    std::uniform_int_distribution<std::size_t> start_dist(0, spec.frame_count - len);
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
      PlantedSegment candidate{start_dist(rng), 0, seg.strength};
      candidate.end = candidate.start + len;
      ok = std::none_of(placed.begin(), placed.end(), [&](const PlantedSegment& p) {
        return candidate.start < p.end && p.start < candidate.end;
      });
      if (ok) placed.push_back(candidate);
    }
    if (!ok) throw InvalidArgument("could not place planted segments without overlap");
  }
  std::sort(placed.begin(), placed.end(),
            [](const PlantedSegment& a, const PlantedSegment& b) { return a.start < b.start; });
  return placed;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd summarize(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

template <typename Fn>
double median_seconds(std::size_t repeats, Fn&& fn) {
  using Clock = std::chrono::steady_clock;
  fn();  // warm-up
  std::vector<double> samples;
  samples.reserve(repeats);
  for (std::size_t i = 0; i < repeats; ++i) {
    const auto t0 = Clock::now();
    fn();
    samples.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

}  // namespace

void check_spec(const SyntheticSpec& spec) {
  if (spec.frame_count == 0 || spec.dim == 0) throw InvalidArgument("frame count and dim must be positive");
  if (!(spec.noise_std >= 0.0) || !(spec.scene_noise >= 0.0)) {
    throw InvalidArgument("noise levels must be non-negative");
  }
  if (spec.num_scenes > spec.frame_count) throw InvalidArgument("more scenes than frames");
  auto sorted = spec.segments;
  std::sort(sorted.begin(), sorted.end(),
            [](const PlantedSegment& a, const PlantedSegment& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& s = sorted[i];
    if (s.start >= s.end || s.end > spec.frame_count) {
      throw InvalidArgument("planted segment [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                            ") is empty or outside [0, t)");
    }
    if (!(s.strength > 0.0)) throw InvalidArgument("planted strength must be positive");
    if (i > 0 && s.start < sorted[i - 1].end) throw InvalidArgument("planted segments overlap");
  }
}

SyntheticSample generate(const SyntheticSpec& spec) {
  check_spec(spec);
  const std::size_t t = spec.frame_count;
  const std::size_t d = spec.dim;
  auto rng = make_rng(spec.seed, kStreamFeatures);

  SyntheticSample sample;
  sample.query.resize(d);
  const auto q = gaussian_vector(d, 1.0, rng);
  normalize_into(q, sample.query.data());
  std::vector<double> query_dir(sample.query.begin(), sample.query.end());

  std::vector<std::vector<double>> scene_dirs;
  for (std::size_t k = 0; k < spec.num_scenes; ++k) scene_dirs.push_back(gaussian_vector(d, 1.0, rng));
  for (auto& dir : scene_dirs) {
    std::vector<float> unit(d);
    normalize_into(dir, unit.data());
    dir.assign(unit.begin(), unit.end());
  }

  std::vector<int> planted(t, -1);
  for (std::size_t i = 0; i < spec.segments.size(); ++i) {
    for (std::size_t f = spec.segments[i].start; f < spec.segments[i].end; ++f) planted[f] = static_cast<int>(i);
  }

  std::vector<float> features(t * d);
  std::vector<double> timestamps(t);
  for (std::size_t f = 0; f < t; ++f) {
    timestamps[f] = static_cast<double>(f);
    float* row = features.data() + f * d;
    if (planted[f] >= 0) {
      sample.truth.push_back(f);
      if (spec.noise_std == 0.0) {
        std::copy(sample.query.begin(), sample.query.end(), row);
        continue;
      }
      auto v = gaussian_vector(d, spec.noise_std, rng);
      const double strength = spec.segments[static_cast<std::size_t>(planted[f])].strength;
      for (std::size_t k = 0; k < d; ++k) v[k] += strength * query_dir[k];
      normalize_into(v, row);
    } else if (!scene_dirs.empty()) {
      const auto& dir = scene_dirs[f * scene_dirs.size() / t];
      auto v = gaussian_vector(d, spec.scene_noise, rng);
      for (std::size_t k = 0; k < d; ++k) v[k] += dir[k];
      normalize_into(v, row);
    } else {
      normalize_into(gaussian_vector(d, 1.0, rng), row);
    }
  }
  sample.pack = FeaturePack("synthetic-" + std::to_string(spec.seed), d, std::move(timestamps),
                            std::move(features), true);
  return sample;
}

RecallReport recall_at_budget(std::span<const std::size_t> selected_frames,
                              std::span<const ClipRange> retrieved,
                              std::span<const PlantedSegment> segments) {
  RecallReport report;
  if (segments.empty()) return report;
  std::size_t truth_size = 0;
  std::size_t found = 0;
  std::size_t hit_segments = 0;
  for (const auto& seg : segments) {
    const ClipRange range{seg.start, seg.end};
    truth_size += range.size();
    found += static_cast<std::size_t>(std::count_if(selected_frames.begin(), selected_frames.end(),
                                                    [&](std::size_t f) { return range.contains(f); }));
    if (std::any_of(retrieved.begin(), retrieved.end(), [&](const ClipRange& r) { return r.overlaps(range); })) {
      ++hit_segments;
    }
  }
  report.frame_recall = static_cast<double>(found) / static_cast<double>(truth_size);
  report.clip_hit_rate = static_cast<double>(hit_segments) / static_cast<double>(segments.size());
  return report;
}

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::kUniformSampling:
      return "uniform_sampling";
    case Strategy::kUniformClips:
      return "uniform_clips";
    case Strategy::kSceneClips:
      return "scene_clips";
    case Strategy::kQueryGuided:
      return "query_guided";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : all_strategies()) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown strategy '" + std::string(name) +
                        "' (expected uniform_sampling, uniform_clips, scene_clips, query_guided or all)");
}

std::vector<Strategy> all_strategies() {
  return {Strategy::kUniformSampling, Strategy::kUniformClips, Strategy::kSceneClips, Strategy::kQueryGuided};
}

std::vector<std::size_t> uniform_sampling(std::size_t frame_count, std::size_t budget) {
  const std::size_t l = std::min(budget, frame_count);
  std::vector<std::size_t> frames;
  frames.reserve(l);
  for (std::size_t i = 0; i < l; ++i) frames.push_back((2 * i + 1) * frame_count / (2 * l));
  return frames;
}

StrategyRun run_strategy(Strategy strategy, const SyntheticSample& sample, const ChunkConfig& chunk_cfg,
                         const RetrievalConfig& retrieval_cfg) {
  StrategyRun run;
  const std::size_t t = sample.pack.count();
  if (strategy == Strategy::kUniformSampling) {
    run.result.budget = retrieval_cfg.frame_budget;
    run.result.selected_frames = uniform_sampling(t, retrieval_cfg.frame_budget);
    for (std::size_t f : run.result.selected_frames) run.retrieved.push_back({f, f + 1});
    return run;
  }

  Segmentation seg;
  SimilaritySeries series;
  if (strategy == Strategy::kQueryGuided) {
    auto out = run_pipeline(sample.pack, sample.query, chunk_cfg, retrieval_cfg);
    seg = std::move(out.segmentation);
    run.result = std::move(out.result);
  } else {
    series = similarity_series(sample.pack, sample.query);
    seg = strategy == Strategy::kUniformClips ? uniform_chunk(t, chunk_cfg.num_clips)
                                              : scene_chunk(sample.pack, chunk_cfg.num_clips);
    run.result = retrieve(series, seg, retrieval_cfg);
  }
  for (const auto& rc : run.result.ranked_clips) run.retrieved.push_back(seg.clips[rc.clip]);
  return run;
}

std::vector<StrategyRow> compare_strategies(const SyntheticSpec& spec, std::span<const Strategy> strategies,
                                            const ChunkConfig& chunk_cfg,
                                            const RetrievalConfig& retrieval_cfg, const BenchConfig& bench) {
  check_spec(spec);
  std::vector<Strategy> order{Strategy::kUniformSampling};
  for (Strategy s : strategies) {
    if (std::find(order.begin(), order.end(), s) == order.end()) order.push_back(s);
  }

  const std::size_t trials = bench.trials;
  // recall[s][k], hit[s][k]
  std::vector<std::vector<double>> recall(order.size(), std::vector<double>(trials));
  std::vector<std::vector<double>> hit(order.size(), std::vector<double>(trials));

  auto run_trial = [&](std::size_t k) {
    SyntheticSpec trial = spec;
    trial.seed = spec.seed + k;
    if (bench.randomize_placement) trial.segments = random_placement(spec, trial.seed);
    const auto sample = generate(trial);
    for (std::size_t s = 0; s < order.size(); ++s) {
      const auto run = run_strategy(order[s], sample, chunk_cfg, retrieval_cfg);
      const auto rep = recall_at_budget(run.result.selected_frames, run.retrieved, trial.segments);
      recall[s][k] = rep.frame_recall;
      hit[s][k] = rep.clip_hit_rate;
    }
  };

  std::size_t workers = bench.threads ? bench.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(trials, 1));
  if (workers <= 1) {
    for (std::size_t k = 0; k < trials; ++k) run_trial(k);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t k = w; k < trials; k += workers) run_trial(k);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<StrategyRow> rows;
  for (std::size_t s = 0; s < order.size(); ++s) {
    const auto r = summarize(recall[s]);
    const auto h = summarize(hit[s]);
    rows.push_back({order[s], trials, r.mean, r.std, h.mean, h.std});
  }
  return rows;
}

StageTimings time_stages(const FeaturePack& pack, std::span<const float> query, const ChunkConfig& chunk_cfg,
                         const RetrievalConfig& retrieval_cfg, std::size_t repeats) {
  if (repeats == 0) throw InvalidArgument("timing needs at least one repeat");
  StageTimings timings;
  SimilaritySeries series;
  Segmentation seg;
  RetrievalResult result;
  timings.similarity = median_seconds(repeats, [&] { series = similarity_series(pack, query); });
  timings.chunking = median_seconds(repeats, [&] { seg = chunk(series, chunk_cfg); });
  timings.retrieval = median_seconds(repeats, [&] { result = retrieve(series, seg, retrieval_cfg); });
  return timings;
}

std::string format_table(std::span<const StrategyRow> rows) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-30s %7s %22s %22s\n", "strategy", "trials", "frame recall",
                "clip hit rate");
  out += line;
  for (const auto& row : rows) {
    std::string name(to_string(row.strategy));
    if (row.strategy == Strategy::kUniformSampling) name += " (baseline)";
    std::snprintf(line, sizeof line, "%-30s %7zu %12.4f +- %6.4f %12.4f +- %6.4f\n", name.c_str(), row.trials,
                  row.mean_recall, row.std_recall, row.mean_clip_hit, row.std_clip_hit);
    out += line;
  }
  return out;
}

std::string format_csv(std::span<const StrategyRow> rows) {
  std::string out = "strategy,trials,mean_recall,std_recall,mean_clip_hit,std_clip_hit\n";
  char line[200];
  for (const auto& row : rows) {
    std::snprintf(line, sizeof line, "%s,%zu,%.6f,%.6f,%.6f,%.6f\n", std::string(to_string(row.strategy)).c_str(),
                  row.trials, row.mean_recall, row.std_recall, row.mean_clip_hit, row.std_clip_hit);
    out += line;
  }
  return out;
}

}  // namespace vclip
