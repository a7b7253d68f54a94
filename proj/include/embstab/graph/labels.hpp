#pragma once

#include <algorithm>
#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include "embstab/error.hpp"
#include "embstab/graph/graph.hpp"
#include "embstab/util/text.hpp"

namespace embstab {

/// Node class assignments. Single-label nodes hold exactly one entry; in
/// multi-label mode a node may hold any number. Nodes absent from the label
/// file have empty assignments and are excluded from downstream evaluation.
struct NodeLabels {
  std::size_t label_count = 0;
  bool multi_label = false;
  std::vector<std::vector<std::uint32_t>> assignments;  // sorted, deduplicated

  bool has_labels(NodeId v) const { return !assignments[v].empty(); }

  std::size_t labeled_count() const {
    std::size_t c = 0;
    for (const auto& a : assignments)
      if (!a.empty()) ++c;
    return c;
  }
};

/// Reads "node label [label...]" lines. Node tokens must already exist in the
/// graph's id map. Repeated lines for one node merge; a single-label node
/// ending up with more than one distinct class is an error.
inline NodeLabels load_labels(std::istream& in, bool multi_label,
                              const std::unordered_map<std::string, NodeId>& node_ids,
                              std::size_t node_count) {
  NodeLabels out;
  out.multi_label = multi_label;
  out.assignments.assign(node_count, {});

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_fields(body);
    if (fields.size() < 2)
      throw ParseError("line " + std::to_string(lineno) +
                       ": expected a node token and at least one label");
    if (!multi_label && fields.size() != 2)
      throw ParseError("line " + std::to_string(lineno) +
                       ": multiple labels on one line in single-label mode");
    const auto it = node_ids.find(std::string(fields[0]));
    if (it == node_ids.end())
      throw ParseError("line " + std::to_string(lineno) + ": unknown node '" +
                       std::string(fields[0]) + "'");
    auto& slot = out.assignments[it->second];
    for (std::size_t f = 1; f < fields.size(); ++f) {
      std::uint64_t label = 0;
      if (!parse_u64(fields[f], label) || label > 0xffffffffULL)
        throw ParseError("line " + std::to_string(lineno) +
                         ": labels must be non-negative integers");
      slot.push_back(static_cast<std::uint32_t>(label));
    }
  }
  if (in.bad()) throw IoError("read failure while loading labels");

  for (NodeId v = 0; v < node_count; ++v) {
    auto& a = out.assignments[v];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    if (!multi_label && a.size() > 1)
      throw ParseError("node id " + std::to_string(v) +
                       " has multiple distinct labels in single-label mode");
    for (std::uint32_t l : a)
      out.label_count = std::max<std::size_t>(out.label_count, std::size_t{l} + 1);
  }
  // A file with no label lines is valid: zero labeled nodes. The split stage
  // rejects it later with an insufficient-data error.
  return out;
}

}  // namespace embstab
