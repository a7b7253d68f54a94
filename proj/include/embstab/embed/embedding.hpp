#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "embstab/error.hpp"
#include "embstab/linalg/matrix.hpp"

namespace embstab {

enum class Algorithm { hope, node2vec, line, external };

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::hope: return "hope";
    case Algorithm::node2vec: return "node2vec";
    case Algorithm::line: return "line";
    case Algorithm::external: return "external";
  }
  return "?";
}

/// One trained embedding: row i is node i's vector.
struct Embedding {
  Matrix matrix;
  Algorithm algorithm = Algorithm::external;
  std::uint64_t seed = 0;
  std::string config_digest;  // hex fingerprint of the producing configuration
};

/// A family of embeddings of the same graph under the same configuration,
/// differing only in seed. All stability measures consume these.
struct EmbeddingSet {
  std::vector<Embedding> runs;
  std::string graph_digest;

  std::size_t run_count() const { return runs.size(); }
  std::size_t node_count() const {
    return runs.empty() ? 0 : static_cast<std::size_t>(runs[0].matrix.rows());
  }
  Index dim() const { return runs.empty() ? 0 : runs[0].matrix.cols(); }

  static EmbeddingSet from_runs(std::vector<Embedding> runs, std::string graph_digest) {
    if (runs.empty()) throw ConfigError("an embedding set needs at least one run");
    const auto rows = runs[0].matrix.rows();
    const auto cols = runs[0].matrix.cols();
    std::unordered_set<std::uint64_t> seeds;
    for (const auto& r : runs) {
      if (r.matrix.rows() != rows || r.matrix.cols() != cols)
        throw DimensionError("embedding runs disagree on shape");
      if (r.algorithm != runs[0].algorithm || r.config_digest != runs[0].config_digest)
        throw ConfigError("embedding runs mix algorithms or configurations");
      if (!all_finite(r.matrix))
        throw NumericError("embedding run contains non-finite values");
      if (!seeds.insert(r.seed).second)
        throw ConfigError("embedding runs repeat seed " + std::to_string(r.seed));
    }
    EmbeddingSet out;
    out.runs = std::move(runs);
    out.graph_digest = std::move(graph_digest);
    return out;
  }
};

}  // namespace embstab
