#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "embstab/graph/graph.hpp"
#include "embstab/util/rng.hpp"

namespace embstab {

/// Parameters as actually used, recorded in the run manifest so a generated
/// graph is reproducible from the manifest alone.
struct GeneratorParams {
  std::string model;  // "ba" or "ws"
  std::size_t n = 0;
  double target_density = 0.0;
  double realized_density = 0.0;
  std::size_t attachment_m = 0;  // ba
  std::size_t ring_degree = 0;   // ws
  double rewire_p = 0.0;         // ws
  std::uint64_t seed = 0;
};

struct GeneratedGraph {
  Graph graph;
  GeneratorParams params;
};

/// Barabasi-Albert preferential attachment sized to a target density:
/// m = round(D (n-1) / 2), seeded with an (m+1)-clique, then each new node
/// attaches to m distinct existing nodes drawn proportionally to degree
/// (by sampling the repeated-endpoint list with rejection of duplicates).
inline GeneratedGraph generate_barabasi_albert(std::size_t n, double target_density,
                                               std::uint64_t seed) {
  if (n < 2) throw ConfigError("ba generator needs at least 2 nodes");
  const long long m_ll = std::llround(target_density * static_cast<double>(n - 1) / 2.0);
  if (m_ll < 1 || static_cast<std::size_t>(m_ll) >= n)
    throw ConfigError("ba attachment count m=" + std::to_string(m_ll) +
                      " out of range for n=" + std::to_string(n) +
                      " (adjust target density)");
  const auto m = static_cast<std::size_t>(m_ll);

  Rng rng(seed);
  std::vector<WeightedEdge> edges;
  std::vector<NodeId> endpoints;  // node id repeated once per incident edge
  edges.reserve(m * (m + 1) / 2 + (n - m - 1) * m);

  for (NodeId u = 0; u + 1 <= m; ++u) {
    for (NodeId v = u + 1; v <= m; ++v) {
      edges.push_back({u, v, 1.0});
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }

  // Epoch-stamped membership check keeps each node's target set O(1).
  std::vector<NodeId> chosen_stamp(n, static_cast<NodeId>(-1));
  std::vector<NodeId> picks(m);
  for (NodeId v = static_cast<NodeId>(m + 1); v < n; ++v) {
    std::size_t got = 0;
    while (got < m) {
      const NodeId t = endpoints[rng.below(endpoints.size())];
      if (chosen_stamp[t] == v) continue;
      chosen_stamp[t] = v;
      picks[got++] = t;
    }
    for (std::size_t i = 0; i < m; ++i) {
      edges.push_back({v, picks[i], 1.0});
      endpoints.push_back(v);
      endpoints.push_back(picks[i]);
    }
  }

  GeneratedGraph out;
  out.graph = Graph::from_edges(n, edges, false);
  out.params.model = "ba";
  out.params.n = n;
  out.params.target_density = target_density;
  out.params.realized_density = out.graph.density();
  out.params.attachment_m = m;
  out.params.seed = seed;
  return out;
}

/// Watts-Strogatz ring lattice sized to a target density: ring degree
/// k = 2 round(D (n-1) / 2), each node wired to its k/2 nearest neighbors on
/// each side, then every lattice edge's far endpoint is rewired with
/// probability p to a uniform non-duplicate, non-self target.
inline GeneratedGraph generate_watts_strogatz(std::size_t n, double target_density,
                                              double rewire_p, std::uint64_t seed) {
  if (n < 2) throw ConfigError("ws generator needs at least 2 nodes");
  if (rewire_p < 0.0 || rewire_p > 1.0)
    throw ConfigError("ws rewiring probability must lie in [0, 1]");
  const long long half_ll =
      std::llround(target_density * static_cast<double>(n - 1) / 2.0);
  const long long k_ll = 2 * half_ll;
  if (k_ll < 2 || static_cast<std::size_t>(k_ll) >= n)
    throw ConfigError("ws ring degree k=" + std::to_string(k_ll) +
                      " out of range for n=" + std::to_string(n) +
                      " (adjust target density)");
  const auto half = static_cast<std::size_t>(half_ll);

  std::vector<std::unordered_set<NodeId>> adj(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t j = 1; j <= half; ++j) {
      const auto v = static_cast<NodeId>((u + j) % n);
      adj[u].insert(v);
      adj[v].insert(static_cast<NodeId>(u));
    }
  }

  Rng rng(seed);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t j = 1; j <= half; ++j) {
      const auto old_v = static_cast<NodeId>((u + j) % n);
      if (rng.uniform() >= rewire_p) continue;
      if (adj[u].size() >= n - 1) continue;     // saturated, nothing to rewire to
      if (!adj[u].count(old_v)) continue;       // already rewired away earlier
      NodeId w;
      do {
        w = static_cast<NodeId>(rng.below(n));
      } while (w == u || adj[u].count(w));
      adj[u].erase(old_v);
      adj[old_v].erase(static_cast<NodeId>(u));
      adj[u].insert(w);
      adj[w].insert(static_cast<NodeId>(u));
    }
  }

  std::vector<WeightedEdge> edges;
  edges.reserve(n * half);
  for (std::size_t u = 0; u < n; ++u)
    for (NodeId v : adj[u])
      if (v > u) edges.push_back({static_cast<NodeId>(u), v, 1.0});

  GeneratedGraph out;
  out.graph = Graph::from_edges(n, edges, false);
  out.params.model = "ws";
  out.params.n = n;
  out.params.target_density = target_density;
  out.params.realized_density = out.graph.density();
  out.params.ring_degree = 2 * half;
  out.params.rewire_p = rewire_p;
  out.params.seed = seed;
  return out;
}

}  // namespace embstab
