// vclip: command-line front end for chunking, retrieval, pair mining,
// synthesis planning, benchmarking and pack validation.
//
// Exit codes: 0 success, 1 I/O or file-format error, 2 invalid input or
// configuration. Results go to --out (or stdout); diagnostics go to stderr.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vclip/chunker.hpp"
#include "vclip/contrastive.hpp"
#include "vclip/error.hpp"
#include "vclip/evalbench.hpp"
#include "vclip/feature_io.hpp"
#include "vclip/json_io.hpp"
#include "vclip/retriever.hpp"
#include "vclip/run_config.hpp"
#include "vclip/synthesizer.hpp"
#include "vclip/validation.hpp"

namespace fs = std::filesystem;
using namespace vclip;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;

void log(const std::string& msg) { std::cerr << "vclip: " << msg << "\n"; }

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(out, text);
  }
}

// Flags set on the command line, layered over an optional --config file.
struct Settings {
  std::string config_path;
  RunConfig flags;

  RunConfig resolve() const {
    if (config_path.empty()) return flags;
    return load_run_config(config_path).merged_with(flags);
  }
};

template <typename T>
CLI::Option* add_override(CLI::App* app, const std::string& name, std::optional<T>& slot, const std::string& help) {
  return app->add_option_function<T>(name, [&slot](const T& v) { slot = v; }, help);
}

void add_config_option(CLI::App* app, Settings& s) {
  app->add_option("--config", s.config_path, "Run configuration file (key = value); flags override it")
      ->check(CLI::ExistingFile);
}

struct QueryOptions {
  std::string queries_path;
  std::string query_id;
};

void add_query_options(CLI::App* app, QueryOptions& q) {
  app->add_option("--query-emb", q.queries_path, "Query JSONL file holding embeddings");
  app->add_option("--query-id", q.query_id, "Query to use from --query-emb (default: the only query)");
}

QueryRecord load_query(const QueryOptions& opts, std::size_t dim) {
  if (opts.queries_path.empty()) throw InvalidArgument("a query embedding is required (--query-emb)");
  const auto queries = read_queries(opts.queries_path);
  const QueryRecord* chosen = nullptr;
  if (opts.query_id.empty()) {
    if (queries.size() != 1) {
      throw InvalidArgument(opts.queries_path + " holds " + std::to_string(queries.size()) +
                            " queries; pick one with --query-id");
    }
    chosen = &queries[0];
  } else {
    for (const auto& q : queries) {
      if (q.query_id == opts.query_id) chosen = &q;
    }
    if (!chosen) throw InvalidArgument("query '" + opts.query_id + "' not found in " + opts.queries_path);
  }
  if (!chosen->embedding) throw InvalidArgument("query '" + chosen->query_id + "' has no embedding");
  if (chosen->embedding->size() != dim) {
    throw InvalidArgument("query dim " + std::to_string(chosen->embedding->size()) + " does not match pack dim " +
                          std::to_string(dim));
  }
  return *chosen;
}

Segmentation segment(const FeaturePack& pack, ChunkMethod method, std::size_t n,
                     const std::optional<SimilaritySeries>& series) {
  switch (method) {
    case ChunkMethod::kUniform:
      return uniform_chunk(pack.count(), n);
    case ChunkMethod::kScene:
      return scene_chunk(pack, n);
    case ChunkMethod::kQueryGuided:
      break;
  }
  return chunk(*series, {n});
}

// --- chunk / retrieve ---------------------------------------------------------

struct ChunkArgs {
  Settings settings;
  std::string features;
  QueryOptions query;
  std::string method = "query_guided";
  std::string out;
};

int run_chunk(const ChunkArgs& a) {
  const auto cfg = a.settings.resolve();
  const auto pack = read_pack(a.features);
  const auto method = parse_chunk_method(a.method);
  std::optional<SimilaritySeries> series;
  if (method == ChunkMethod::kQueryGuided) {
    const auto q = load_query(a.query, pack.dim());
    series = similarity_series(pack, *q.embedding);
  }
  const auto seg = segment(pack, method, cfg.num_clips.value_or(kDefaultNumClips), series);
  emit(a.out, dump_pretty(segmentation_to_json(seg, pack.video_id())));
  return 0;
}

int run_retrieve(const ChunkArgs& a) {
  const auto cfg = a.settings.resolve();
  const auto pack = read_pack(a.features);
  const auto method = parse_chunk_method(a.method);
  const auto q = load_query(a.query, pack.dim());
  const RetrievalConfig rcfg{cfg.top_k.value_or(kDefaultTopK), cfg.frame_budget.value_or(kDefaultFrameBudget)};
  const std::size_t n = cfg.num_clips.value_or(kDefaultNumClips);

  RetrievalResult result;
  if (method == ChunkMethod::kQueryGuided) {
    result = run_pipeline(pack, *q.embedding, {n}, rcfg).result;
  } else {
    const auto series = similarity_series(pack, *q.embedding);
    result = retrieve(series, segment(pack, method, n, series), rcfg);
  }
  emit(a.out, dump_pretty(result_to_json(result, q.query_id, pack.video_id())));
  return 0;
}

// --- synth ----------------------------------------------------------------------

struct SynthArgs {
  Settings settings;
  std::string index;
  std::size_t candidates = kDefaultCandidates;
  std::size_t negatives = kDefaultRetainedNegatives;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  const auto cfg = a.settings.resolve();
  const auto corpus = read_short_video_index(a.index);
  log("planning " + std::to_string(corpus.size()) + " synthetic videos");
  const auto candidates = build_candidates(corpus, a.candidates);
  const auto manifests = plan_synthesis(corpus, candidates, {cfg.seed.value_or(0), a.negatives});
  emit(a.out, dump_pretty(manifests_to_json(manifests)));
  return 0;
}

// --- mine -----------------------------------------------------------------------

struct MineArgs {
  Settings settings;
  std::string corpus;
  std::string mode = "coarse";
  std::size_t negatives = kDefaultCoarseNegatives;
  bool with_loss = false;
  std::string queries;
  std::string out;
};

struct MineCorpus {
  std::vector<CorpusVideo> videos;
  std::map<std::string, fs::path> features;  // video id -> pack path
};

// {"videos": [{"video_id", "clips": [[s, e], ...] | "segmentation": PATH,
//              "features": PATH (optional), "queries": [{"query_id", "positive_clip"}]}]}
MineCorpus read_mine_corpus(const fs::path& path) {
  const auto base = path.parent_path();
  MineCorpus out;
  try {
    const auto doc = Json::parse(read_text_file(path));
    for (const auto& v : doc.at("videos")) {
      CorpusVideo video;
      video.video_id = v.at("video_id").get<std::string>();
      if (v.contains("segmentation")) {
        const auto seg_path = base / v.at("segmentation").get<std::string>();
        video.segmentation = segmentation_from_json(Json::parse(read_text_file(seg_path)));
      } else {
        for (const auto& c : v.at("clips")) {
          video.segmentation.clips.push_back({c.at(0).get<std::size_t>(), c.at(1).get<std::size_t>()});
        }
      }
      if (!video.segmentation.clips.empty()) {
        throw_if_invalid(validate_segmentation(video.segmentation, video.segmentation.clips.back().end),
                         "video " + video.video_id);
      }
      for (const auto& q : v.at("queries")) {
        video.queries.push_back({q.at("query_id").get<std::string>(), q.at("positive_clip").get<std::size_t>()});
      }
      if (v.contains("features")) out.features[video.video_id] = base / v.at("features").get<std::string>();
      out.videos.push_back(std::move(video));
    }
  } catch (const Json::exception& e) {
    throw FormatError(FormatError::Kind::kMalformedJson, path.string() + ": " + e.what());
  }
  return out;
}

void attach_losses(std::vector<MinedPair>& pairs, const MineCorpus& corpus, const std::string& queries_path,
                   double temperature) {
  if (queries_path.empty()) throw InvalidArgument("--with-loss needs query embeddings (--queries)");
  std::map<std::string, std::vector<float>> embeddings;
  for (const auto& q : read_queries(queries_path)) {
    if (q.embedding) embeddings[q.query_id] = *q.embedding;
  }
  std::map<std::string, FeaturePack> packs;
  auto pack_of = [&](const std::string& vid) -> const FeaturePack& {
    if (auto it = packs.find(vid); it != packs.end()) return it->second;
    const auto path = corpus.features.find(vid);
    if (path == corpus.features.end()) throw InvalidArgument("--with-loss: video " + vid + " has no features");
    return packs.emplace(vid, read_pack(path->second)).first->second;
  };
  for (auto& pair : pairs) {
    const auto q = embeddings.find(pair.query_id);
    if (q == embeddings.end()) throw InvalidArgument("--with-loss: no embedding for query " + pair.query_id);
    std::map<std::string, std::vector<double>> series;
    auto series_of = [&](const std::string& vid) -> const std::vector<double>& {
      if (auto it = series.find(vid); it != series.end()) return it->second;
      const auto s = similarity_series(pack_of(vid), q->second);
      return series.emplace(vid, std::vector<double>(s.values().begin(), s.values().end())).first->second;
    };
    pair.loss = contrastive_loss(batch_for_pair(pair, temperature, series_of));
  }
}

int run_mine(const MineArgs& a) {
  const auto cfg = a.settings.resolve();
  const auto corpus = read_mine_corpus(a.corpus);
  const MiningConfig mcfg{parse_loss_mode(a.mode), a.negatives, cfg.seed.value_or(0)};
  auto mined = mine_pairs(corpus.videos, mcfg);
  for (const auto& w : mined.warnings) log("warning: " + w);
  if (a.with_loss) attach_losses(mined.pairs, corpus, a.queries, cfg.temperature.value_or(kDefaultTemperature));
  log("mined " + std::to_string(mined.pairs.size()) + " pairs");
  emit(a.out, format_pairs_jsonl(mined.pairs));
  return 0;
}

// --- bench ----------------------------------------------------------------------

struct BenchArgs {
  Settings settings;
  std::size_t trials = 100;
  std::size_t frames = 1000;
  std::size_t dim = 512;
  std::size_t segment_length = 50;
  double sigma = 0.1;
  double mu = 1.0;
  std::size_t scenes = 0;
  std::size_t threads = 0;
  bool fixed_placement = false;
  bool timing = false;
  std::size_t repeats = 5;
  std::string csv;
  std::string json;
};

std::vector<Strategy> parse_strategies(const std::string& list) {
  if (list == "all") return all_strategies();
  std::vector<Strategy> out;
  std::stringstream in(list);
  std::string name;
  while (std::getline(in, name, ',')) out.push_back(parse_strategy(name));
  if (out.empty()) throw InvalidArgument("empty strategy list");
  return out;
}

int run_bench(const BenchArgs& a) {
  const auto cfg = a.settings.resolve();
  const auto strategies = parse_strategies(cfg.strategy.value_or("all"));
  if (a.segment_length == 0 || a.segment_length > a.frames) {
    throw InvalidArgument("--segment-length must be in [1, t]");
  }
  SyntheticSpec spec;
  spec.frame_count = a.frames;
  spec.dim = a.dim;
  const std::size_t start = (a.frames - a.segment_length) / 2;
  spec.segments = {{start, start + a.segment_length, a.mu}};
  spec.noise_std = a.sigma;
  spec.num_scenes = a.scenes;
  spec.seed = cfg.seed.value_or(0);
  const ChunkConfig ccfg{cfg.num_clips.value_or(kDefaultNumClips)};
  const RetrievalConfig rcfg{cfg.top_k.value_or(kDefaultTopK), cfg.frame_budget.value_or(kDefaultFrameBudget)};

  log("running " + std::to_string(a.trials) + " trials");
  const auto rows = compare_strategies(spec, strategies, ccfg, rcfg, {a.trials, !a.fixed_placement, a.threads});
  std::cout << format_table(rows);

  Json doc;
  doc["rows"] = Json::array();
  for (const auto& r : rows) {
    doc["rows"].push_back({{"strategy", std::string(to_string(r.strategy))},
                           {"trials", r.trials},
                           {"mean_recall", r.mean_recall},
                           {"std_recall", r.std_recall},
                           {"mean_clip_hit", r.mean_clip_hit},
                           {"std_clip_hit", r.std_clip_hit}});
  }
  if (a.timing) {
    const auto sample = generate(spec);
    const auto t = time_stages(sample.pack, sample.query, ccfg, rcfg, a.repeats);
    std::printf("\nstage timings (median of %zu, t=%zu, d=%zu)\n", a.repeats, a.frames, a.dim);
    std::printf("  similarity  %10.3f ms\n  chunking    %10.3f ms\n  retrieval   %10.3f ms\n",
                t.similarity * 1e3, t.chunking * 1e3, t.retrieval * 1e3);
    doc["timing_seconds"] = {{"similarity", t.similarity}, {"chunking", t.chunking}, {"retrieval", t.retrieval}};
  }
  std::cout.flush();
  if (!a.csv.empty()) write_text_file(a.csv, format_csv(rows));
  if (!a.json.empty()) write_text_file(a.json, dump_pretty(doc));
  return 0;
}

// --- validate ---------------------------------------------------------------------

struct ValidateArgs {
  std::vector<std::string> packs;
  std::string queries;
};

int run_validate(const ValidateArgs& a) {
  int status = 0;
  auto fail = [&](int code, const std::string& msg) {
    log(msg);
    // An I/O or format failure outranks an invariant violation.
    if (status == 0 || code == kExitIo) status = code;
  };
  std::optional<std::size_t> dim;
  for (const auto& path : a.packs) {
    try {
      const auto pack = read_pack(path);
      std::cout << "ok " << path << " (" << pack.count() << " frames, dim " << pack.dim()
                << (pack.normalized() ? ", normalized" : "") << ")\n";
      if (!dim) dim = pack.dim();
    } catch (const InvalidArgument& e) {
      fail(kExitInvalid, e.what());
    } catch (const IoError& e) {
      fail(kExitIo, e.what());
    }
  }
  if (!a.queries.empty()) {
    try {
      const auto queries = read_queries(a.queries);
      for (const auto& q : queries) {
        if (q.embedding && dim && q.embedding->size() != *dim) {
          throw InvalidArgument(a.queries + ": query '" + q.query_id + "' has dim " +
                                std::to_string(q.embedding->size()) + ", packs have dim " + std::to_string(*dim));
        }
      }
      std::cout << "ok " << a.queries << " (" << queries.size() << " queries)\n";
    } catch (const InvalidArgument& e) {
      fail(kExitInvalid, e.what());
    } catch (const IoError& e) {
      fail(kExitIo, e.what());
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query-guided clip chunking and retrieval over precomputed video features"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "vclip 0.1.0");

  ChunkArgs chunk_args;
  auto* chunk_cmd = app.add_subcommand("chunk", "Split a video into clips and write the segmentation as JSON");
  add_config_option(chunk_cmd, chunk_args.settings);
  chunk_cmd->add_option("--features", chunk_args.features, "Feature pack (.ocfp) of the video")->required();
  add_query_options(chunk_cmd, chunk_args.query);
  add_override(chunk_cmd, "--n", chunk_args.settings.flags.num_clips, "Number of clips (default 32)");
  chunk_cmd->add_option("--method", chunk_args.method, "Chunking method: query_guided, uniform or scene")
      ->capture_default_str();
  chunk_cmd->add_option("--out", chunk_args.out, "Output path (default stdout)");

  ChunkArgs retrieve_args;
  auto* retrieve_cmd = app.add_subcommand("retrieve", "Chunk, rank clips against a query and select frames");
  add_config_option(retrieve_cmd, retrieve_args.settings);
  retrieve_cmd->add_option("--features", retrieve_args.features, "Feature pack (.ocfp) of the video")->required();
  add_query_options(retrieve_cmd, retrieve_args.query);
  add_override(retrieve_cmd, "--n", retrieve_args.settings.flags.num_clips, "Number of clips (default 32)");
  add_override(retrieve_cmd, "--k", retrieve_args.settings.flags.top_k, "Clips to retrieve (default 8)");
  add_override(retrieve_cmd, "--budget", retrieve_args.settings.flags.frame_budget, "Frame budget (default 16)");
  retrieve_cmd->add_option("--method", retrieve_args.method, "Chunking method: query_guided, uniform or scene")
      ->capture_default_str();
  retrieve_cmd->add_option("--out", retrieve_args.out, "Output path (default stdout)");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Plan synthetic long videos from a short-video index");
  add_config_option(synth_cmd, synth_args.settings);
  synth_cmd->add_option("--index", synth_args.index, "JSONL index of short videos")->required();
  add_override(synth_cmd, "--seed", synth_args.settings.flags.seed, "Seed for component ordering (default 0)");
  synth_cmd->add_option("--candidates", synth_args.candidates, "Visually similar candidates per anchor")
      ->capture_default_str();
  synth_cmd->add_option("--negatives", synth_args.negatives, "Negatives retained per anchor")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth_args.out, "Output path (default stdout)");

  MineArgs mine_args;
  auto* mine_cmd = app.add_subcommand("mine", "Mine positive/negative clip pairs for contrastive training");
  add_config_option(mine_cmd, mine_args.settings);
  mine_cmd->add_option("--corpus", mine_args.corpus, "Corpus JSON listing videos, clips and labeled queries")
      ->required();
  mine_cmd->add_option("--mode", mine_args.mode, "Negative source: coarse (other videos) or fine (same video)")
      ->capture_default_str();
  mine_cmd->add_option("--negatives", mine_args.negatives, "Coarse negatives sampled per query")
      ->capture_default_str();
  add_override(mine_cmd, "--seed", mine_args.settings.flags.seed, "Sampling seed (default 0)");
  mine_cmd->add_flag("--with-loss", mine_args.with_loss, "Add the contrastive loss of each pair");
  mine_cmd->add_option("--queries", mine_args.queries, "Query JSONL with embeddings (for --with-loss)");
  add_override(mine_cmd, "--temperature", mine_args.settings.flags.temperature,
               "Loss temperature (default 0.07)");
  mine_cmd->add_option("--out", mine_args.out, "Output path (default stdout)");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Compare retrieval strategies on planted synthetic data");
  add_config_option(bench_cmd, bench_args.settings);
  add_override(bench_cmd, "--strategy", bench_args.settings.flags.strategy,
               "all, or a comma list of uniform_sampling, uniform_clips, scene_clips, query_guided");
  bench_cmd->add_option("--trials", bench_args.trials, "Number of seeded trials")->capture_default_str();
  bench_cmd->add_option("--t", bench_args.frames, "Frames per synthetic video")->capture_default_str();
  bench_cmd->add_option("--d", bench_args.dim, "Feature dimension")->capture_default_str();
  bench_cmd->add_option("--segment-length", bench_args.segment_length, "Length of the planted segment")
      ->capture_default_str();
  bench_cmd->add_option("--sigma", bench_args.sigma, "Noise on planted frames")->capture_default_str();
  bench_cmd->add_option("--mu", bench_args.mu, "Query signal strength on planted frames")->capture_default_str();
  bench_cmd->add_option("--scenes", bench_args.scenes, "Scene count of the background (0: random frames)")
      ->capture_default_str();
  add_override(bench_cmd, "--n", bench_args.settings.flags.num_clips, "Number of clips (default 32)");
  add_override(bench_cmd, "--k", bench_args.settings.flags.top_k, "Clips to retrieve (default 8)");
  add_override(bench_cmd, "--budget", bench_args.settings.flags.frame_budget, "Frame budget (default 16)");
  add_override(bench_cmd, "--seed", bench_args.settings.flags.seed, "Seed of the first trial (default 0)");
  bench_cmd->add_option("--threads", bench_args.threads, "Worker threads (0: all cores)")->capture_default_str();
  bench_cmd->add_flag("--fixed-placement", bench_args.fixed_placement,
                      "Keep the planted segment centered instead of re-placing it each trial");
  bench_cmd->add_flag("--timing", bench_args.timing, "Also report per-stage timings");
  bench_cmd->add_option("--repeats", bench_args.repeats, "Timed runs per stage")->capture_default_str();
  bench_cmd->add_option("--csv", bench_args.csv, "Also write the table as CSV");
  bench_cmd->add_option("--json", bench_args.json, "Also write results as JSON");

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Check feature packs and query files");
  validate_cmd->add_option("packs", validate_args.packs, "Feature packs to check")->required();
  validate_cmd->add_option("--queries", validate_args.queries, "Query JSONL to check against the packs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*chunk_cmd) return run_chunk(chunk_args);
    if (*retrieve_cmd) return run_retrieve(retrieve_args);
    if (*synth_cmd) return run_synth(synth_args);
    if (*mine_cmd) return run_mine(mine_args);
    if (*bench_cmd) return run_bench(bench_args);
    if (*validate_cmd) return run_validate(validate_args);
  } catch (const InvalidArgument& e) {
    log(e.what());
    return kExitInvalid;
  } catch (const IoError& e) {
    log(e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    log(std::string("unexpected error: ") + e.what());
    return kExitIo;
  }
  return 0;
}
