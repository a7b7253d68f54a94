#pragma once

#include <cstdint>
#include <queue>
#include <unordered_set>
#include <utility>
#include <vector>

#include "embstab/error.hpp"
#include "embstab/graph/graph.hpp"
#include "embstab/util/rng.hpp"

namespace embstab {

enum class PairCategory { one_hop, two_hop, distant };

inline const char* pair_category_name(PairCategory c) {
  switch (c) {
    case PairCategory::one_hop: return "one_hop";
    case PairCategory::two_hop: return "two_hop";
    case PairCategory::distant: return "distant";
  }
  return "?";
}

struct NodePairSample {
  PairCategory category{};
  std::vector<std::pair<NodeId, NodeId>> pairs;
  bool complete = true;  // false when the attempt budget ran out first
};

struct PairSamples {
  NodePairSample one_hop;
  NodePairSample two_hop;
  NodePairSample distant;
};

namespace detail {

/// Shortest-path distance from u to v, explored at most 3 hops deep.
/// Returns 1, 2, or 3, where 3 stands for "at least 3" (including
/// unreachable). Distance only ever feeds the three-way category split,
/// so the search never needs to go further.
inline int bounded_distance(const Graph& g, NodeId u, NodeId v,
                            std::vector<int>& depth_scratch,
                            std::vector<NodeId>& touched) {
  if (g.has_edge(u, v)) return 1;
  touched.clear();
  auto visit = [&](NodeId x, int d) {
    depth_scratch[x] = d;
    touched.push_back(x);
  };
  std::queue<NodeId> q;
  visit(u, 0);
  q.push(u);
  int result = 3;
  while (!q.empty()) {
    const NodeId cur = q.front();
    q.pop();
    const int d = depth_scratch[cur];
    if (d >= 2) break;  // children would be at depth 3; that is already "distant"
    for (NodeId nb : g.neighbors(cur)) {
      if (depth_scratch[nb] >= 0) continue;
      if (nb == v) {
        result = d + 1;
        goto done;
      }
      visit(nb, d + 1);
      q.push(nb);
    }
  }
done:
  for (NodeId x : touched) depth_scratch[x] = -1;
  return result;
}

}  // namespace detail

/// Draws uniform random node pairs and buckets them by graph distance into
/// one-hop, two-hop and distant (>= 3 hops or unreachable) samples, without
/// replacement within a category, until each bucket holds `count_per_category`
/// pairs or the global attempt budget (3000 x count) runs out. Dense graphs
/// with diameter 2 legitimately exhaust the budget for the distant bucket;
/// that bucket then comes back partial with complete = false.
inline PairSamples sample_node_pairs(const Graph& g, std::size_t count_per_category,
                                     std::uint64_t seed) {
  const std::size_t n = g.node_count();
  if (n < 2) throw InsufficientDataError("pair sampling needs at least 2 nodes");
  if (count_per_category == 0) throw ConfigError("pair count must be positive");

  PairSamples out;
  out.one_hop.category = PairCategory::one_hop;
  out.two_hop.category = PairCategory::two_hop;
  out.distant.category = PairCategory::distant;

  Rng rng(seed);
  std::vector<int> depth(n, -1);
  std::vector<NodeId> touched;
  std::unordered_set<std::uint64_t> seen[3];

  auto bucket = [&](PairCategory c) -> NodePairSample& {
    switch (c) {
      case PairCategory::one_hop: return out.one_hop;
      case PairCategory::two_hop: return out.two_hop;
      default: return out.distant;
    }
  };

  const std::size_t budget = 3000 * count_per_category;
  std::size_t attempts = 0;
  auto filled = [&] {
    return out.one_hop.pairs.size() >= count_per_category &&
           out.two_hop.pairs.size() >= count_per_category &&
           out.distant.pairs.size() >= count_per_category;
  };
  while (!filled() && attempts < budget) {
    ++attempts;
    auto u = static_cast<NodeId>(rng.below(n));
    auto v = static_cast<NodeId>(rng.below(n));
    if (u == v) continue;
    if (!g.directed() && u > v) std::swap(u, v);
    const int d = detail::bounded_distance(g, u, v, depth, touched);
    const PairCategory c = d == 1   ? PairCategory::one_hop
                           : d == 2 ? PairCategory::two_hop
                                    : PairCategory::distant;
    auto& b = bucket(c);
    if (b.pairs.size() >= count_per_category) continue;
    const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
    if (!seen[static_cast<int>(c)].insert(key).second) continue;
    b.pairs.emplace_back(u, v);
  }
  out.one_hop.complete = out.one_hop.pairs.size() >= count_per_category;
  out.two_hop.complete = out.two_hop.pairs.size() >= count_per_category;
  out.distant.complete = out.distant.pairs.size() >= count_per_category;
  return out;
}

}  // namespace embstab
