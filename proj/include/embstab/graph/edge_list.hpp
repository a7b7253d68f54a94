#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "embstab/graph/graph.hpp"
#include "embstab/util/text.hpp"

namespace embstab {

struct EdgeListResult {
  Graph graph;
  std::vector<std::string> id_to_token;  // original node names by internal id
  std::unordered_map<std::string, NodeId> token_to_id;
  std::size_t self_loops_dropped = 0;
};

/// Reads a whitespace-separated edge list: one "u v" (or "u v w") per line.
/// Blank lines and lines starting with '#' are skipped. Node tokens are
/// arbitrary strings mapped to dense ids in order of first appearance.
/// Self loops are dropped and counted; parallel edges merge by weight sum.
inline EdgeListResult load_edge_list(std::istream& in, bool directed, bool weighted) {
  EdgeListResult out;
  std::vector<WeightedEdge> edges;
  auto intern = [&out](std::string_view token) -> NodeId {
    auto it = out.token_to_id.find(std::string(token));
    if (it != out.token_to_id.end()) return it->second;
    const auto id = static_cast<NodeId>(out.id_to_token.size());
    out.id_to_token.emplace_back(token);
    out.token_to_id.emplace(out.id_to_token.back(), id);
    return id;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_fields(body);
    const std::size_t expected = weighted ? 3 : 2;
    if (fields.size() != expected)
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(expected) + " fields, got " +
                       std::to_string(fields.size()));
    double w = 1.0;
    if (weighted) {
      if (!parse_double(fields[2], w) || !std::isfinite(w) || !(w > 0.0))
        throw ParseError("line " + std::to_string(lineno) +
                         ": weight must be a finite positive number");
    }
    const NodeId u = intern(fields[0]);
    const NodeId v = intern(fields[1]);
    if (u == v) {
      ++out.self_loops_dropped;
      continue;
    }
    edges.push_back({u, v, w});
  }
  if (in.bad()) throw IoError("read failure while loading edge list");
  if (out.id_to_token.empty()) throw ParseError("edge list contains no edges or nodes");

  out.graph = Graph::from_edges(out.id_to_token.size(), edges, directed);
  return out;
}

/// Writes the graph back out in the same format: each undirected edge once
/// (smaller endpoint first), each directed arc once, sorted. Weights are
/// printed only when not 1, matching what the loader needs to reconstruct.
inline void save_edge_list(const Graph& g, std::ostream& out, bool weighted) {
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto nbrs = g.neighbors(u);
    const auto ws = g.weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (!g.directed() && nbrs[i] < u) continue;
      out << u << ' ' << nbrs[i];
      if (weighted) out << ' ' << format_double(ws[i]);
      out << '\n';
    }
  }
  if (!out) throw IoError("write failure while saving edge list");
}

}  // namespace embstab
