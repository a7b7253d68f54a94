#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "embstab/error.hpp"
#include "embstab/graph/graph.hpp"

namespace embstab {

enum class CentralityKind { degree, pagerank, coreness };

inline const char* centrality_name(CentralityKind k) {
  switch (k) {
    case CentralityKind::degree: return "degree";
    case CentralityKind::pagerank: return "pagerank";
    case CentralityKind::coreness: return "coreness";
  }
  return "?";
}

struct CentralityScores {
  CentralityKind kind{};
  std::vector<double> values;
  bool converged = true;  // only meaningful for pagerank
};

inline CentralityScores degree_centrality(const Graph& g) {
  CentralityScores out;
  out.kind = CentralityKind::degree;
  out.values.resize(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v)
    out.values[v] = static_cast<double>(g.degree(v));
  return out;
}

/// Power iteration on the weight-normalized transition matrix. Mass on nodes
/// without outgoing weight is redistributed uniformly over all nodes, so the
/// scores always sum to one. Failure to reach tol only clears `converged`.
inline CentralityScores pagerank(const Graph& g, double damping = 0.85,
                                 double tol = 1e-10, int max_iter = 200) {
  if (damping < 0.0 || damping >= 1.0)
    throw ConfigError("pagerank damping must lie in [0, 1)");
  const std::size_t n = g.node_count();
  if (n == 0) throw ConfigError("pagerank needs a non-empty graph");

  CentralityScores out;
  out.kind = CentralityKind::pagerank;
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n, 0.0);
  out.converged = false;
  for (int it = 0; it < max_iter; ++it) {
    double dangling = 0.0;
    std::fill(next.begin(), next.end(), (1.0 - damping) / static_cast<double>(n));
    for (NodeId u = 0; u < n; ++u) {
      const double wd = g.weighted_degree(u);
      if (wd <= 0.0) {
        dangling += x[u];
        continue;
      }
      const double push = damping * x[u] / wd;
      const auto nbrs = g.neighbors(u);
      const auto ws = g.weights(u);
      for (std::size_t i = 0; i < nbrs.size(); ++i) next[nbrs[i]] += push * ws[i];
    }
    const double spread = damping * dangling / static_cast<double>(n);
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] += spread;
      delta += std::abs(next[v] - x[v]);
    }
    x.swap(next);
    if (delta < tol) {
      out.converged = true;
      break;
    }
  }
  double total = 0.0;
  for (double v : x) total += v;
  for (double& v : x) v /= total;
  out.values = std::move(x);
  return out;
}

/// Core numbers by minimum-degree peeling (bucket variant). Directed graphs
/// are treated as their undirected projection.
inline CentralityScores coreness(const Graph& g) {
  const std::size_t n = g.node_count();
  CentralityScores out;
  out.kind = CentralityKind::coreness;
  out.values.assign(n, 0.0);
  if (n == 0) return out;

  // Undirected projection adjacency (dedup union of in/out).
  std::vector<std::vector<NodeId>> adj;
  const bool project = g.directed();
  if (project) {
    adj.assign(n, {});
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v : g.neighbors(u)) {
        adj[u].push_back(v);
        adj[v].push_back(u);
      }
    for (auto& row : adj) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    }
  }
  auto nbrs_of = [&](NodeId v) -> std::span<const NodeId> {
    return project ? std::span<const NodeId>(adj[v]) : g.neighbors(v);
  };

  std::vector<std::size_t> deg(n);
  std::size_t max_deg = 0;
  for (NodeId v = 0; v < n; ++v) {
    deg[v] = nbrs_of(v).size();
    max_deg = std::max(max_deg, deg[v]);
  }
  // Counting sort of nodes by degree.
  std::vector<std::size_t> bin(max_deg + 2, 0);
  for (NodeId v = 0; v < n; ++v) ++bin[deg[v]];
  std::size_t start = 0;
  for (std::size_t d = 0; d <= max_deg; ++d) {
    const std::size_t count = bin[d];
    bin[d] = start;
    start += count;
  }
  std::vector<NodeId> order(n);
  std::vector<std::size_t> pos(n);
  {
    std::vector<std::size_t> cursor(bin.begin(), bin.end());
    for (NodeId v = 0; v < n; ++v) {
      pos[v] = cursor[deg[v]];
      order[pos[v]] = v;
      ++cursor[deg[v]];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const NodeId v = order[i];
    out.values[v] = static_cast<double>(deg[v]);
    for (NodeId u : nbrs_of(v)) {
      if (deg[u] <= deg[v]) continue;
      // Swap u toward the front of its degree bucket, then shrink its degree.
      const std::size_t du = deg[u];
      const std::size_t pu = pos[u];
      const std::size_t pw = bin[du];
      const NodeId w = order[pw];
      if (u != w) {
        std::swap(order[pu], order[pw]);
        pos[u] = pw;
        pos[w] = pu;
      }
      ++bin[du];
      --deg[u];
    }
  }
  return out;
}

}  // namespace embstab
