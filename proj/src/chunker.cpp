#include "vclip/chunker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vclip/error.hpp"

namespace vclip {

namespace {

void check_clip_count(std::size_t n, std::size_t frame_count) {
  if (n == 0) throw InvalidArgument("number of clips must be positive");
  if (n > frame_count) {
    throw InvalidArgument("number of clips n=" + std::to_string(n) + " exceeds frame count t=" +
                          std::to_string(frame_count));
  }
}

double squared_norm(std::span<const float> v) {
  double acc = 0.0;
  for (float x : v) acc += static_cast<double>(x) * static_cast<double>(x);
  return acc;
}

double dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

// sqrt(na * nb) rather than sqrt(na) * sqrt(nb): identical vectors give
// exactly 1.0 because sqrt(fl(x * x)) == x.
double cosine(double dot_ab, double norm2_a, double norm2_b) {
  return std::clamp(dot_ab / std::sqrt(norm2_a * norm2_b), -1.0, 1.0);
}

Segmentation from_boundaries(const std::vector<std::size_t>& starts, std::size_t frame_count,
                             ChunkMethod method) {
  Segmentation seg;
  seg.method = method;
  seg.clips.reserve(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const std::size_t end = i + 1 < starts.size() ? starts[i + 1] : frame_count;
    seg.clips.push_back({starts[i], end});
  }
  return seg;
}

}  // namespace

SimilaritySeries similarity_series(const FeaturePack& pack, std::span<const float> query) {
  if (query.size() != pack.dim()) {
    throw InvalidArgument("query dim " + std::to_string(query.size()) + " does not match pack dim " +
                          std::to_string(pack.dim()));
  }
  if (!std::all_of(query.begin(), query.end(), [](float x) { return std::isfinite(x); })) {
    throw InvalidArgument("query embedding contains a non-finite value");
  }
  const double query_norm2 = squared_norm(query);
  if (query_norm2 == 0.0) throw InvalidArgument("query embedding has zero norm");

  std::vector<double> values(pack.count());
  for (std::size_t i = 0; i < pack.count(); ++i) {
    const auto row = pack.row(i);
    const double row_norm2 = squared_norm(row);
    if (!std::isfinite(row_norm2)) {
      throw InvalidArgument("frame " + std::to_string(i) + " contains a non-finite value");
    }
    if (row_norm2 == 0.0) throw InvalidArgument("frame " + std::to_string(i) + " has zero norm");
    values[i] = cosine(dot(row, query), row_norm2, query_norm2);
  }
  return SimilaritySeries(std::move(values));
}

std::vector<double> peak_scores(std::span<const double> series) {
  const std::size_t t = series.size();
  if (t == 0) throw InvalidArgument("peak scores need a non-empty series");

  std::vector<double> left(t);
  double running = series[0];
  left[0] = series[0];
  for (std::size_t i = 1; i < t; ++i) {
    left[i] = std::min(running, series[i]);
    running = std::min(running, series[i]);
  }

  std::vector<double> scores(t);
  running = series[t - 1];
  for (std::size_t i = t; i-- > 0;) {
    const double right = i + 1 < t ? std::min(running, series[i]) : series[i];
    scores[i] = 2.0 * series[i] - left[i] - right;
    running = std::min(running, series[i]);
  }
  return scores;
}

std::vector<std::size_t> select_centers(std::span<const double> scores, std::size_t n) {
  check_clip_count(n, scores.size());
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
                    });
  order.resize(n);
  std::sort(order.begin(), order.end());
  return order;
}

std::optional<std::size_t> optimal_boundary(std::span<const double> gap) {
  if (gap.size() < 3) return std::nullopt;
  const std::size_t tj = gap.size() - 1;

  // drop[k] = sum_{i=1..k} (s_i - s_{i+1}), 1-based over the gap.
  std::vector<double> drop(tj + 1, 0.0);
  for (std::size_t k = 1; k <= tj; ++k) drop[k] = drop[k - 1] + (gap[k - 1] - gap[k]);

  std::size_t best_b = 1;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 1; b < tj; ++b) {
    // sum_{l=b+1..tj} (s_{l+1} - s_l) is the negated tail of the drop sums.
    const double rise = -(drop[tj] - drop[b]);
    const double objective = drop[b] + rise / static_cast<double>(tj - b);
    if (objective > best) {
      best = objective;
      best_b = b;
    }
  }
  return best_b;
}

Segmentation chunk(const SimilaritySeries& series, const ChunkConfig& cfg) {
  const std::size_t t = series.size();
  check_clip_count(cfg.num_clips, t);

  const auto scores = peak_scores(series.values());
  auto centers = select_centers(scores, cfg.num_clips);

  std::vector<std::size_t> starts{0};
  starts.reserve(centers.size());
  const auto s = series.values();
  for (std::size_t j = 0; j + 1 < centers.size(); ++j) {
    const std::size_t left = centers[j];
    const std::size_t right = centers[j + 1];
    const std::size_t gap_frames = right - left - 1;
    std::size_t boundary;
    if (gap_frames < 2) {
      boundary = right;  // a lone gap frame stays with the left center
    } else {
      const auto b = optimal_boundary(s.subspan(left + 1, gap_frames + 1));
      boundary = left + 1 + *b;
    }
    starts.push_back(boundary);
  }

  auto seg = from_boundaries(starts, t, ChunkMethod::kQueryGuided);
  seg.centers = std::move(centers);
  return seg;
}

Segmentation uniform_chunk(std::size_t frame_count, std::size_t n) {
  check_clip_count(n, frame_count);
  const std::size_t base = frame_count / n;
  const std::size_t larger = frame_count % n;
  std::vector<std::size_t> starts;
  starts.reserve(n);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    starts.push_back(pos);
    pos += base + (i < larger ? 1 : 0);
  }
  return from_boundaries(starts, frame_count, ChunkMethod::kUniform);
}

Segmentation scene_chunk(const FeaturePack& pack, std::size_t n) {
  const std::size_t t = pack.count();
  check_clip_count(n, t);

  std::vector<double> norms(t);
  for (std::size_t i = 0; i < t; ++i) {
    norms[i] = squared_norm(pack.row(i));
    if (!std::isfinite(norms[i])) {
      throw InvalidArgument("frame " + std::to_string(i) + " contains a non-finite value");
    }
    if (norms[i] == 0.0) throw InvalidArgument("frame " + std::to_string(i) + " has zero norm");
  }
  // adjacency[i] = cos(f_i, f_{i+1}); a cut after frame i starts a clip at i+1.
  std::vector<double> adjacency(t - 1);
  for (std::size_t i = 0; i + 1 < t; ++i) {
    adjacency[i] = cosine(dot(pack.row(i), pack.row(i + 1)), norms[i], norms[i + 1]);
  }

  std::vector<std::size_t> order(adjacency.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto cuts = static_cast<std::ptrdiff_t>(n - 1);
  std::partial_sort(order.begin(), order.begin() + cuts, order.end(), [&](std::size_t a, std::size_t b) {
    return adjacency[a] < adjacency[b] || (adjacency[a] == adjacency[b] && a < b);
  });

  std::vector<std::size_t> starts{0};
  for (std::ptrdiff_t i = 0; i < cuts; ++i) starts.push_back(order[static_cast<std::size_t>(i)] + 1);
  std::sort(starts.begin(), starts.end());
  return from_boundaries(starts, t, ChunkMethod::kScene);
}

}  // namespace vclip
