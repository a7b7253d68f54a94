#pragma once

#include <cmath>
#include <memory>
#include <string>

#include "embstab/embed/embedding.hpp"
#include "embstab/error.hpp"
#include "embstab/graph/graph.hpp"
#include "embstab/linalg/linear_operator.hpp"
#include "embstab/linalg/randomized_svd.hpp"
#include "embstab/util/digest.hpp"

namespace embstab {

struct HopeConfig {
  double beta_factor = 0.5;  // beta = beta_factor / spectral_radius(A)
  double neumann_tol = 1e-9;
  int neumann_max_terms = 500;
  Index svd_oversample = 10;
  // Katz spectra of ring lattices are nearly flat around any truncation
  // rank, so the subspace iteration needs real depth before embeddings stop
  // depending on the sketch. Shallow counts (4 or so) leave runs only ~0.75
  // aligned; 100 pins them to ~1.0 and stays cheap since each pass is a few
  // sparse products.
  int svd_power_iters = 100;
};

namespace detail {

struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> nbrs;
  std::vector<double> ws;
};

inline Adjacency transpose_adjacency(const Graph& g) {
  const std::size_t n = g.node_count();
  Adjacency t;
  t.offsets.assign(n + 1, 0);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : g.neighbors(u)) ++t.offsets[v + 1];
  for (std::size_t v = 0; v < n; ++v) t.offsets[v + 1] += t.offsets[v];
  t.nbrs.resize(t.offsets.back());
  t.ws.resize(t.offsets.back());
  std::vector<std::size_t> cursor(t.offsets.begin(), t.offsets.end() - 1);
  for (NodeId u = 0; u < n; ++u) {
    const auto nbrs = g.neighbors(u);
    const auto ws = g.weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      t.nbrs[cursor[nbrs[i]]] = u;
      t.ws[cursor[nbrs[i]]] = ws[i];
      ++cursor[nbrs[i]];
    }
  }
  return t;
}

}  // namespace detail

/// Largest eigenvalue magnitude of the weighted adjacency matrix, by power
/// iteration from the all-ones vector. Returns 0 for edgeless graphs.
inline double estimate_spectral_radius(const Graph& g, int iters = 100,
                                       double tol = 1e-12) {
  const std::size_t n = g.node_count();
  if (n == 0) throw ConfigError("spectral radius needs a non-empty graph");
  Vector x = Vector::Constant(static_cast<Index>(n),
                              1.0 / std::sqrt(static_cast<double>(n)));
  Vector y(static_cast<Index>(n));
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    y.setZero();
    for (NodeId u = 0; u < n; ++u) {
      const auto nbrs = g.neighbors(u);
      const auto ws = g.weights(u);
      double acc = 0.0;
      for (std::size_t i = 0; i < nbrs.size(); ++i) acc += ws[i] * x(nbrs[i]);
      y(u) = acc;
    }
    const double norm = y.norm();
    if (!std::isfinite(norm)) throw NumericError("spectral radius estimate diverged");
    if (norm == 0.0) return 0.0;
    const double prev = lambda;
    lambda = norm;
    x = y / norm;
    if (it > 0 && std::abs(lambda - prev) <= tol * lambda) break;
  }
  return lambda;
}

/// Katz similarity S = sum_{t>=1} beta^t A^t as a matrix-free operator. Each
/// apply runs the truncated Neumann series until the newest term is tiny
/// relative to the accumulated result.
inline LinearOperator katz_operator(const Graph& g, double beta, double tol,
                                    int max_terms) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw ConfigError("katz beta must be finite and positive");
  if (max_terms < 1) throw ConfigError("katz series needs at least one term");

  const std::size_t n = g.node_count();
  auto trans = g.directed()
                   ? std::make_shared<detail::Adjacency>(detail::transpose_adjacency(g))
                   : nullptr;

  // Forward rows come from the graph; transposed rows from the reversed copy.
  auto series = [&g, n, beta, tol, max_terms, trans](const Matrix& x,
                                                     bool transposed) -> Matrix {
    if (x.rows() != static_cast<Index>(n))
      throw DimensionError("operator input has wrong row count");
    Matrix acc = Matrix::Zero(x.rows(), x.cols());
    Matrix term = x;
    Matrix next(x.rows(), x.cols());
    for (int t = 1; t <= max_terms; ++t) {
      for (NodeId u = 0; u < n; ++u) {
        auto row = next.row(u);
        row.setZero();
        if (!transposed || !trans) {
          const auto nbrs = g.neighbors(u);
          const auto ws = g.weights(u);
          for (std::size_t i = 0; i < nbrs.size(); ++i)
            row += (beta * ws[i]) * term.row(nbrs[i]);
        } else {
          for (std::size_t i = trans->offsets[u]; i < trans->offsets[u + 1]; ++i)
            row += (beta * trans->ws[i]) * term.row(trans->nbrs[i]);
        }
      }
      term.swap(next);
      acc += term;
      const double tn = term.norm();
      if (!std::isfinite(tn)) throw NumericError("katz series diverged; beta too large");
      if (tn == 0.0 || tn <= tol * std::max(acc.norm(), 1e-300)) return acc;
    }
    throw NumericError("katz series did not converge within " +
                       std::to_string(max_terms) + " terms (beta=" +
                       std::to_string(beta) + ")");
  };

  LinearOperator op;
  op.dim = static_cast<Index>(n);
  op.apply = [series](const Matrix& x) { return series(x, false); };
  op.apply_transpose = [series](const Matrix& x) { return series(x, true); };
  return op;
}

/// HOPE with Katz proximity: randomized rank-d/2 SVD of S, embedding
/// [U sqrt(Sigma) | V sqrt(Sigma)]. The only randomness is the SVD sketch,
/// which is why embeddings are near-identical across seeds.
inline Embedding hope_embed(const Graph& g, Index d, const HopeConfig& cfg,
                            std::uint64_t seed) {
  if (d < 2 || d % 2 != 0) throw ConfigError("hope dimension must be even");
  if (g.node_count() == 0) throw ConfigError("hope needs a non-empty graph");
  if (!(cfg.beta_factor > 0.0) || cfg.beta_factor >= 1.0)
    throw ConfigError("hope beta factor must lie in (0, 1)");
  const Index rank = d / 2;
  if (rank > static_cast<Index>(g.node_count()))
    throw ConfigError("hope dimension too large for this graph");

  Embedding e;
  e.algorithm = Algorithm::hope;
  e.seed = seed;
  {
    Digest dg;
    dg.str("hope");
    dg.pod(static_cast<std::int64_t>(d));
    dg.pod(cfg.beta_factor);
    dg.pod(cfg.neumann_tol);
    dg.pod(static_cast<std::int64_t>(cfg.neumann_max_terms));
    dg.pod(static_cast<std::int64_t>(cfg.svd_oversample));
    dg.pod(static_cast<std::int64_t>(cfg.svd_power_iters));
    e.config_digest = dg.hex();
  }

  const double radius = estimate_spectral_radius(g);
  if (radius == 0.0) {
    // No edges: the Katz matrix is zero and so is its best low-rank factor.
    e.matrix = Matrix::Zero(static_cast<Index>(g.node_count()), d);
    return e;
  }
  const double beta = cfg.beta_factor / radius;
  const auto op = katz_operator(g, beta, cfg.neumann_tol, cfg.neumann_max_terms);
  const auto svd =
      randomized_svd(op, rank, cfg.svd_oversample, cfg.svd_power_iters, seed);

  const Vector scale = svd.sigma.array().max(0.0).sqrt();
  e.matrix.resize(static_cast<Index>(g.node_count()), d);
  e.matrix.leftCols(rank) = svd.u * scale.asDiagonal();
  e.matrix.rightCols(rank) = svd.v * scale.asDiagonal();
  return e;
}

}  // namespace embstab
