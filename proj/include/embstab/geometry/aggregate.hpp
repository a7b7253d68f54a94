#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "embstab/error.hpp"
#include "embstab/geometry/measures.hpp"
#include "embstab/graph/centrality.hpp"

namespace embstab {

/// Letter-value summary: median, fourths, eighths and sixteenths, computed
/// with the halved-depth rule d1 = (1+n)/2, d_{i+1} = (1+floor(d_i))/2 and
/// half depths averaging the two adjacent order statistics.
struct LetterValues {
  double median = 0.0;
  double fourth_lo = 0.0, fourth_hi = 0.0;
  double eighth_lo = 0.0, eighth_hi = 0.0;
  double sixteenth_lo = 0.0, sixteenth_hi = 0.0;
};

inline LetterValues letter_values(std::vector<double> v) {
  if (v.empty()) throw InsufficientDataError("letter values need at least one value");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  auto at_depth_lo = [&](double d) {
    const auto lo = static_cast<std::size_t>(std::floor(d));
    const auto hi = static_cast<std::size_t>(std::ceil(d));
    return (v[lo - 1] + v[hi - 1]) / 2.0;
  };
  auto at_depth_hi = [&](double d) {
    const auto lo = static_cast<std::size_t>(std::floor(d));
    const auto hi = static_cast<std::size_t>(std::ceil(d));
    return (v[n - lo] + v[n - hi]) / 2.0;
  };
  const double d1 = (1.0 + static_cast<double>(n)) / 2.0;
  const double d2 = (1.0 + std::floor(d1)) / 2.0;
  const double d3 = (1.0 + std::floor(d2)) / 2.0;
  const double d4 = (1.0 + std::floor(d3)) / 2.0;
  LetterValues out;
  out.median = at_depth_lo(d1);
  out.fourth_lo = at_depth_lo(d2);
  out.fourth_hi = at_depth_hi(d2);
  out.eighth_lo = at_depth_lo(d3);
  out.eighth_hi = at_depth_hi(d3);
  out.sixteenth_lo = at_depth_lo(d4);
  out.sixteenth_hi = at_depth_hi(d4);
  return out;
}

/// Everything the report stage needs about one measure over all run pairs.
struct StabilityReport {
  Measure measure{};
  std::size_t pair_count = 0;
  double grand_mean = 0.0;          // over every unflagged (pair, node) value
  LetterValues quantiles;           // over per-node means
  std::vector<double> per_node_mean;
  std::vector<std::uint8_t> node_valid;  // 0 where every pair flagged the node
  std::size_t excluded_nodes = 0;
  std::size_t degenerate_alignments = 0;
};

inline StabilityReport aggregate(const std::vector<PairwiseNodeScores>& per_pair) {
  if (per_pair.empty())
    throw InsufficientDataError("aggregation needs at least one run pair");
  const std::size_t n = per_pair[0].node_count();
  for (const auto& p : per_pair) {
    if (p.node_count() != n) throw DimensionError("score vectors disagree on length");
    if (p.measure != per_pair[0].measure)
      throw ConfigError("cannot aggregate across different measures");
  }

  StabilityReport out;
  out.measure = per_pair[0].measure;
  out.pair_count = per_pair.size();
  out.per_node_mean.assign(n, 0.0);
  out.node_valid.assign(n, 0);

  std::vector<std::size_t> valid_pairs(n, 0);
  double total = 0.0;
  std::size_t total_count = 0;
  for (const auto& p : per_pair) {
    out.degenerate_alignments += p.degenerate_alignment ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (p.flagged[i]) continue;
      out.per_node_mean[i] += p.values[i];
      ++valid_pairs[i];
      total += p.values[i];
      ++total_count;
    }
  }
  if (total_count == 0)
    throw InsufficientDataError("every (pair, node) value was flagged");
  out.grand_mean = total / static_cast<double>(total_count);

  std::vector<double> means;
  means.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (valid_pairs[i] == 0) {
      ++out.excluded_nodes;
      out.per_node_mean[i] = 0.0;
      continue;
    }
    out.per_node_mean[i] /= static_cast<double>(valid_pairs[i]);
    out.node_valid[i] = 1;
    means.push_back(out.per_node_mean[i]);
  }
  out.quantiles = letter_values(std::move(means));
  return out;
}

/// Per-node means laid out along a centrality ordering, smoothed with a
/// centered moving average. This is the "stability versus node importance"
/// curve; valid nodes only.
struct CentralityProfile {
  CentralityKind kind{};
  std::size_t window = 0;
  std::vector<std::uint32_t> node_order;    // valid nodes, ascending centrality
  std::vector<double> centrality_sorted;
  std::vector<double> moving_mean;
};

inline CentralityProfile centrality_profile(const StabilityReport& report,
                                            const CentralityScores& centrality,
                                            double window_fraction = 0.01) {
  const std::size_t n = report.per_node_mean.size();
  if (centrality.values.size() != n)
    throw DimensionError("centrality scores disagree with report length");
  if (!(window_fraction > 0.0) || window_fraction > 1.0)
    throw ConfigError("window fraction must lie in (0, 1]");

  CentralityProfile out;
  out.kind = centrality.kind;
  for (std::uint32_t v = 0; v < n; ++v)
    if (report.node_valid[v]) out.node_order.push_back(v);
  if (out.node_order.empty())
    throw InsufficientDataError("no valid nodes for a centrality profile");
  std::stable_sort(out.node_order.begin(), out.node_order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return centrality.values[a] != centrality.values[b]
                                ? centrality.values[a] < centrality.values[b]
                                : a < b;
                   });

  const std::size_t m = out.node_order.size();
  out.window = std::max<std::size_t>(
      20, static_cast<std::size_t>(
              std::ceil(window_fraction * static_cast<double>(n))));
  out.window = std::min(out.window, m);

  out.centrality_sorted.resize(m);
  std::vector<double> series(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.centrality_sorted[i] = centrality.values[out.node_order[i]];
    series[i] = report.per_node_mean[out.node_order[i]];
  }
  std::vector<double> prefix(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] + series[i];

  out.moving_mean.resize(m);
  const std::size_t half = out.window / 2;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(i + half, m - 1);
    out.moving_mean[i] = (prefix[hi + 1] - prefix[lo]) /
                         static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace embstab
