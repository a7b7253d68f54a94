#pragma once

#include <cstdint>
#include <vector>

#include "embstab/embed/embedding.hpp"
#include "embstab/embed/sgns.hpp"
#include "embstab/error.hpp"
#include "embstab/graph/graph.hpp"
#include "embstab/linalg/normalize.hpp"
#include "embstab/util/alias.hpp"
#include "embstab/util/digest.hpp"
#include "embstab/util/rng.hpp"

namespace embstab {

enum class LineOrder { first, second, both };

struct LineConfig {
  LineOrder order = LineOrder::both;
  int samples_per_edge = 100;  // total draws per half = samples_per_edge * |E|
  bool densify = false;        // reserved; rejected below
  SgnsOptions sgns;
};

namespace detail {

constexpr std::uint64_t kLineFirstTag = 0x6c696e652e6f3161ULL;
constexpr std::uint64_t kLineSecondTag = 0x6c696e652e6f3262ULL;
constexpr std::uint64_t kLineEdgeTag = 0x6c696e652e656467ULL;
constexpr std::uint64_t kLineSgnsTag = 0x6c696e652e73676eULL;

/// Trains one LINE half. Positive pairs are adjacency entries (both
/// orientations of every undirected edge) drawn proportionally to edge
/// weight; the noise distribution is the weighted degree. First-order mode
/// shares one table between centers and contexts, second-order keeps a
/// separate context table.
inline Matrix line_half(const Graph& g, Index dim, const LineConfig& cfg,
                        bool first_order, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  std::vector<NodeId> src, dst;
  std::vector<double> w;
  src.reserve(2 * g.edge_count());
  dst.reserve(2 * g.edge_count());
  w.reserve(2 * g.edge_count());
  for (NodeId u = 0; u < n; ++u) {
    const auto nbrs = g.neighbors(u);
    const auto ws = g.weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      src.push_back(u);
      dst.push_back(nbrs[i]);
      w.push_back(ws[i]);
    }
  }
  const AliasTable edges(w);
  Rng edge_rng(derive_seed(seed, kLineEdgeTag));

  std::vector<double> noise(n);
  for (NodeId v = 0; v < n; ++v) noise[v] = g.weighted_degree(v);

  const std::size_t total =
      static_cast<std::size_t>(cfg.samples_per_edge) * g.edge_count();
  SgnsOptions opt = cfg.sgns;
  opt.shared_table = first_order;
  auto next = [&](std::uint32_t& center, std::uint32_t& context) {
    const std::uint32_t e = edges.sample(edge_rng);
    center = src[e];
    context = dst[e];
  };
  SgnsResult trained = sgns_train(n, dim, total, next, noise, opt,
                                  derive_seed(seed, kLineSgnsTag));
  return std::move(trained.input);
}

}  // namespace detail

/// LINE: first-order half models observed edges directly with one shared
/// vector table, second-order half models neighborhood distributions with a
/// separate context table. Each trained half is row-normalized, then the
/// requested halves are concatenated.
inline Embedding line_embed(const Graph& g, Index d, const LineConfig& cfg,
                            std::uint64_t seed) {
  if (cfg.densify)
    throw ConfigError(
        "line densification preprocessing is not implemented; rerun with "
        "densify=false");
  if (d < 1) throw ConfigError("line dimension must be positive");
  if (cfg.order == LineOrder::both && d % 2 != 0)
    throw ConfigError("line with both halves needs an even dimension");
  if (cfg.samples_per_edge < 1)
    throw ConfigError("line needs samples_per_edge >= 1");
  if (g.node_count() == 0) throw ConfigError("line needs a non-empty graph");
  if (g.edge_count() == 0)
    throw InsufficientDataError("line needs at least one edge to sample");

  Embedding out;
  out.algorithm = Algorithm::line;
  out.seed = seed;
  {
    Digest dg;
    dg.str("line");
    dg.pod(static_cast<std::int64_t>(d));
    dg.pod(static_cast<std::int64_t>(static_cast<int>(cfg.order)));
    dg.pod(static_cast<std::int64_t>(cfg.samples_per_edge));
    dg.pod(static_cast<std::int64_t>(cfg.sgns.negatives));
    dg.pod(cfg.sgns.initial_lr);
    dg.pod(cfg.sgns.noise_exponent);
    out.config_digest = dg.hex();
  }

  if (cfg.order == LineOrder::first) {
    out.matrix =
        row_normalize(detail::line_half(g, d, cfg, true,
                                        derive_seed(seed, detail::kLineFirstTag)))
            .matrix;
    return out;
  }
  if (cfg.order == LineOrder::second) {
    out.matrix =
        row_normalize(detail::line_half(g, d, cfg, false,
                                        derive_seed(seed, detail::kLineSecondTag)))
            .matrix;
    return out;
  }
  const Index half = d / 2;
  const Matrix first =
      row_normalize(detail::line_half(g, half, cfg, true,
                                      derive_seed(seed, detail::kLineFirstTag)))
          .matrix;
  const Matrix second =
      row_normalize(detail::line_half(g, half, cfg, false,
                                      derive_seed(seed, detail::kLineSecondTag)))
          .matrix;
  out.matrix.resize(static_cast<Index>(g.node_count()), d);
  out.matrix.leftCols(half) = first;
  out.matrix.rightCols(half) = second;
  return out;
}

}  // namespace embstab
