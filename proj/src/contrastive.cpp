#include "vclip/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "vclip/error.hpp"

namespace vclip {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_batch(const ContrastiveBatch& batch) {
  if (!(batch.temperature > 0.0) || !std::isfinite(batch.temperature)) {
    throw InvalidArgument("temperature must be positive and finite");
  }
  if (batch.positive_similarities.empty()) throw InvalidArgument("batch has no positive similarities");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(batch.positive_similarities.begin(), batch.positive_similarities.end(), finite) ||
      !std::all_of(batch.negative_similarities.begin(), batch.negative_similarities.end(), finite)) {
    throw InvalidArgument("batch contains a non-finite similarity");
  }
}

// log(1 + exp(a)) without overflow; exactly 0 for a = -inf.
double softplus(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

// log(sum_j exp(s_j / tau)), -inf for no negatives.
double negative_logsumexp(const ContrastiveBatch& batch) {
  const auto& neg = batch.negative_similarities;
  if (neg.empty()) return kNegInf;
  const double top = *std::max_element(neg.begin(), neg.end()) / batch.temperature;
  double acc = 0.0;
  for (double s : neg) acc += std::exp(s / batch.temperature - top);
  return top + std::log(acc);
}

std::mt19937_64 query_rng(std::uint64_t seed, std::uint64_t ordinal) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(ordinal), static_cast<std::uint32_t>(ordinal >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

double contrastive_loss(const ContrastiveBatch& batch) {
  check_batch(batch);
  // Each positive term is -log(e^x / (e^x + e^N)) = softplus(N - x).
  const double neg_lse = negative_logsumexp(batch);
  double total = 0.0;
  for (double s : batch.positive_similarities) total += softplus(neg_lse - s / batch.temperature);
  return total / static_cast<double>(batch.positive_similarities.size());
}

double coarse_loss(const ContrastiveBatch& batch) {
  if (batch.mode != LossMode::kCoarse) throw InvalidArgument("coarse_loss needs a coarse batch");
  return contrastive_loss(batch);
}

double fine_loss(const ContrastiveBatch& batch) {
  if (batch.mode != LossMode::kFine) throw InvalidArgument("fine_loss needs a fine batch");
  return contrastive_loss(batch);
}

LossGradient loss_gradient(const ContrastiveBatch& batch) {
  check_batch(batch);
  const double tau = batch.temperature;
  const double m = static_cast<double>(batch.positive_similarities.size());
  const double neg_lse = negative_logsumexp(batch);

  LossGradient grad;
  grad.positives.reserve(batch.positive_similarities.size());
  grad.negatives.assign(batch.negative_similarities.size(), 0.0);
  for (double s : batch.positive_similarities) {
    const double x = s / tau;
    const double a = neg_lse - x;
    // dL/dx_i = -(1/m) * (1 - p_i), with 1 - p_i = sigmoid(N - x_i).
    grad.positives.push_back(-sigmoid(a) / (m * tau));
    // dL/dx_j = (1/m) * exp(x_j) / (exp(x_i) + e^N) for every negative j.
    const double log_denominator = x + softplus(a);
    for (std::size_t j = 0; j < batch.negative_similarities.size(); ++j) {
      grad.negatives[j] += std::exp(batch.negative_similarities[j] / tau - log_denominator) / (m * tau);
    }
  }
  return grad;
}

MiningOutput mine_pairs(std::span<const CorpusVideo> corpus, const MiningConfig& cfg) {
  std::set<std::string> ids;
  for (const auto& video : corpus) {
    if (!ids.insert(video.video_id).second) throw InvalidArgument("duplicate video id " + video.video_id);
    for (const auto& q : video.queries) {
      if (q.positive_clip >= video.segmentation.n()) {
        throw InvalidArgument("query " + q.query_id + " labels clip " + std::to_string(q.positive_clip) +
                              " but video " + video.video_id + " has " +
                              std::to_string(video.segmentation.n()) + " clips");
      }
    }
  }

  // Every clip in corpus order, tagged with its owning video index.
  std::vector<std::pair<std::size_t, ClipRef>> all_clips;
  for (std::size_t v = 0; v < corpus.size(); ++v) {
    for (const auto& clip : corpus[v].segmentation.clips) {
      all_clips.push_back({v, ClipRef{corpus[v].video_id, clip}});
    }
  }

  MiningOutput out;
  std::uint64_t ordinal = 0;
  for (std::size_t v = 0; v < corpus.size(); ++v) {
    const auto& video = corpus[v];
    for (const auto& q : video.queries) {
      const std::uint64_t this_ordinal = ordinal++;
      MinedPair pair;
      pair.query_id = q.query_id;
      pair.mode = cfg.mode;
      pair.positive = {video.video_id, video.segmentation.clips[q.positive_clip]};

      if (cfg.mode == LossMode::kFine) {
        if (video.segmentation.n() < 2) {
          out.warnings.push_back("skipping query " + q.query_id + ": video " + video.video_id +
                                 " has a single clip, no same-video negatives");
          continue;
        }
        for (std::size_t c = 0; c < video.segmentation.n(); ++c) {
          if (c != q.positive_clip) pair.negatives.push_back({video.video_id, video.segmentation.clips[c]});
        }
      } else {
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < all_clips.size(); ++i) {
          if (all_clips[i].first != v) pool.push_back(i);
        }
        if (pool.empty()) {
          out.warnings.push_back("skipping query " + q.query_id + ": no other videos to draw negatives from");
          continue;
        }
        const std::size_t take = std::min(cfg.coarse_negatives, pool.size());
        auto rng = query_rng(cfg.seed, this_ordinal);
        for (std::size_t i = 0; i < take; ++i) {
          std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
          std::swap(pool[i], pool[pick(rng)]);
        }
        pool.resize(take);
        std::sort(pool.begin(), pool.end());
        for (std::size_t i : pool) pair.negatives.push_back(all_clips[i].second);
      }
      out.pairs.push_back(std::move(pair));
    }
  }
  return out;
}

}  // namespace vclip
