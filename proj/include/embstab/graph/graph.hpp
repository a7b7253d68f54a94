#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "embstab/error.hpp"
#include "embstab/util/digest.hpp"

namespace embstab {

using NodeId = std::uint32_t;

struct WeightedEdge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 1.0;
};

/// Compressed sparse row graph. For undirected graphs every edge is stored in
/// both directions, so adjacency(u) is always the full neighborhood.
/// Neighbor lists are sorted by id, which makes iteration order (and
/// everything seeded that consumes it) deterministic.
class Graph {
 public:
  Graph() = default;

  /// Builds from an edge list. Parallel edges collapse by summing weights.
  /// Self loops are rejected here; file loaders drop and count them earlier.
  static Graph from_edges(std::size_t node_count, std::span<const WeightedEdge> edges,
                          bool directed) {
    Graph g;
    g.n_ = node_count;
    g.directed_ = directed;

    std::vector<WeightedEdge> es(edges.begin(), edges.end());
    for (auto& e : es) {
      if (e.u >= node_count || e.v >= node_count)
        throw DimensionError("edge endpoint out of range");
      if (e.u == e.v) throw ConfigError("self loops are not representable");
      if (!(e.w > 0.0) || !std::isfinite(e.w))
        throw ConfigError("edge weights must be finite and positive");
      if (!directed && e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(es.begin(), es.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    std::vector<WeightedEdge> merged;
    merged.reserve(es.size());
    for (const auto& e : es) {
      if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v)
        merged.back().w += e.w;
      else
        merged.push_back(e);
    }
    g.edge_count_ = merged.size();

    std::vector<std::size_t> degree(node_count, 0);
    for (const auto& e : merged) {
      ++degree[e.u];
      if (!directed) ++degree[e.v];
    }
    g.offsets_.assign(node_count + 1, 0);
    for (std::size_t v = 0; v < node_count; ++v)
      g.offsets_[v + 1] = g.offsets_[v] + degree[v];
    g.neighbors_.resize(g.offsets_.back());
    g.weights_.resize(g.offsets_.back());

    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    auto put = [&](NodeId from, NodeId to, double w) {
      g.neighbors_[cursor[from]] = to;
      g.weights_[cursor[from]] = w;
      ++cursor[from];
    };
    for (const auto& e : merged) {
      put(e.u, e.v, e.w);
      if (!directed) put(e.v, e.u, e.w);
    }
    // Sources were sorted, and for undirected graphs the reverse entries
    // arrive in order of the partner id too, so each list is already sorted
    // except the undirected mix of forward and reverse rows.
    if (!directed) {
      for (std::size_t v = 0; v < node_count; ++v) {
        auto b = g.offsets_[v], e = g.offsets_[v + 1];
        std::vector<std::pair<NodeId, double>> row;
        row.reserve(e - b);
        for (std::size_t i = b; i < e; ++i)
          row.emplace_back(g.neighbors_[i], g.weights_[i]);
        std::sort(row.begin(), row.end());
        for (std::size_t i = b; i < e; ++i) {
          g.neighbors_[i] = row[i - b].first;
          g.weights_[i] = row[i - b].second;
        }
      }
    }

    g.weighted_degree_.assign(node_count, 0.0);
    for (std::size_t v = 0; v < node_count; ++v)
      for (std::size_t i = g.offsets_[v]; i < g.offsets_[v + 1]; ++i)
        g.weighted_degree_[v] += g.weights_[i];
    return g;
  }

  std::size_t node_count() const { return n_; }
  /// Unique edges: undirected pairs once, directed arcs once.
  std::size_t edge_count() const { return edge_count_; }
  bool directed() const { return directed_; }

  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  double weighted_degree(NodeId v) const { return weighted_degree_[v]; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v], degree(v)};
  }
  std::span<const double> weights(NodeId v) const {
    return {weights_.data() + offsets_[v], degree(v)};
  }

  bool has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  double density() const {
    if (n_ < 2) return 0.0;
    const double possible = static_cast<double>(n_) * static_cast<double>(n_ - 1);
    return directed_ ? static_cast<double>(edge_count_) / possible
                     : 2.0 * static_cast<double>(edge_count_) / possible;
  }

  std::string digest() const {
    Digest d;
    d.pod(static_cast<std::uint64_t>(n_));
    d.pod(static_cast<std::uint8_t>(directed_ ? 1 : 0));
    d.bytes(offsets_.data(), offsets_.size() * sizeof(offsets_[0]));
    d.bytes(neighbors_.data(), neighbors_.size() * sizeof(neighbors_[0]));
    d.bytes(weights_.data(), weights_.size() * sizeof(weights_[0]));
    return d.hex();
  }

 private:
  std::size_t n_ = 0;
  bool directed_ = false;
  std::size_t edge_count_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<double> weights_;
  std::vector<double> weighted_degree_;
};

}  // namespace embstab
