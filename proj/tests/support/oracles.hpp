#pragma once

// Independent reference implementations the tests check the library against.
// Everything here is written naively on purpose: full scans, dense loops,
// grid searches. Keep it slow and obvious.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <utility>
#include <vector>

#include "embstab/graph/graph.hpp"
#include "embstab/graph/labels.hpp"
#include "embstab/linalg/matrix.hpp"
#include "embstab/util/rng.hpp"

namespace oracle {

using embstab::Graph;
using embstab::Index;
using embstab::Matrix;
using embstab::NodeId;

inline Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  embstab::Rng rng(seed);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
  return m;
}

// Row-wise normalization without touching the library's implementation.
inline Matrix normalize_rows(const Matrix& z) {
  Matrix out = z;
  for (Index i = 0; i < out.rows(); ++i) {
    const double n = out.row(i).norm();
    if (n > 0.0) out.row(i) /= n;
  }
  return out;
}

// Brute-force k nearest neighbors by cosine: all similarities, full sort by
// (similarity desc, id asc), zero rows excluded both as queries and candidates.
inline std::vector<std::vector<std::uint32_t>> brute_knn(const Matrix& z, int k) {
  const Index n = z.rows();
  const Matrix zn = normalize_rows(z);
  std::vector<bool> zero(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) zero[static_cast<std::size_t>(i)] = z.row(i).norm() == 0.0;

  std::vector<std::vector<std::uint32_t>> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    if (zero[static_cast<std::size_t>(i)]) continue;
    std::vector<std::pair<double, std::uint32_t>> sims;
    for (Index j = 0; j < n; ++j) {
      if (j == i || zero[static_cast<std::size_t>(j)]) continue;
      sims.push_back({zn.row(i).dot(zn.row(j)), static_cast<std::uint32_t>(j)});
    }
    std::sort(sims.begin(), sims.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (int t = 0; t < k && t < static_cast<int>(sims.size()); ++t)
      out[static_cast<std::size_t>(i)].push_back(sims[static_cast<std::size_t>(t)].second);
  }
  return out;
}

// Exhaustive orthogonal-group search in two dimensions: rotations and
// reflections on a fine angle grid. Returns the Q minimizing ||A Q - B||_F.
inline Eigen::Matrix2d grid_procrustes_2d(const Matrix& a, const Matrix& b,
                                          int steps = 7200) {
  Eigen::Matrix2d best = Eigen::Matrix2d::Identity();
  double best_err = (a * best - b).norm();
  for (int s = 0; s < steps; ++s) {
    const double t = 2.0 * std::numbers::pi * s / steps;
    const double c = std::cos(t), sn = std::sin(t);
    Eigen::Matrix2d rot, refl;
    rot << c, -sn, sn, c;
    refl << c, sn, sn, -c;
    for (const auto& q : {rot, refl}) {
      const double err = (a * q - b).norm();
      if (err < best_err) {
        best_err = err;
        best = q;
      }
    }
  }
  return best;
}

// One-sided Jacobi SVD (Hestenes): rotate column pairs of a copy of A until
// all are mutually orthogonal; singular values are the column norms. Slow and
// self-contained, used as the dense oracle for the randomized factorization.
inline std::vector<double> jacobi_singular_values(Matrix a) {
  const Index n = a.cols();
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n - 1; ++p)
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a.col(p).dot(a.col(q));
        const double app = a.col(p).squaredNorm();
        const double aqq = a.col(q).squaredNorm();
        off = std::max(off, std::abs(apq) / std::max(std::sqrt(app * aqq), 1e-300));
        if (apq == 0.0) continue;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Index i = 0; i < a.rows(); ++i) {
          const double ap = a(i, p), aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
      }
    if (off < 1e-14) break;
  }
  std::vector<double> sigma(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) sigma[static_cast<std::size_t>(j)] = a.col(j).norm();
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

// Plain breadth-first search distance; -1 when unreachable.
inline int bfs_distance(const Graph& g, NodeId src, NodeId dst) {
  if (src == dst) return 0;
  std::vector<int> dist(g.node_count(), -1);
  std::deque<NodeId> queue{src};
  dist[src] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] != -1) continue;
      dist[v] = dist[u] + 1;
      if (v == dst) return dist[v];
      queue.push_back(v);
    }
  }
  return -1;
}

// Naive k-core: repeatedly strip nodes of degree < k.
inline std::vector<std::uint32_t> brute_coreness(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> deg(n);
  for (NodeId v = 0; v < n; ++v) deg[v] = g.degree(v);
  std::vector<bool> removed(n, false);
  std::vector<std::uint32_t> core(n, 0);
  for (std::uint32_t k = 0;; ++k) {
    bool any_left = false;
    bool changed = true;
    while (changed) {
      changed = false;
      for (NodeId v = 0; v < n; ++v) {
        if (removed[v] || deg[v] >= k + 1) continue;
        core[v] = k;
        removed[v] = true;
        changed = true;
        for (NodeId u : g.neighbors(v))
          if (!removed[u]) --deg[u];
      }
    }
    for (NodeId v = 0; v < n; ++v) any_left |= !removed[v];
    if (!any_left) break;
  }
  return core;
}

// Direct second-order score for one node: cosine between its similarity
// profiles over the given id union, computed with plain loops.
inline double second_order_direct(const Matrix& zl, const Matrix& zm, Index node,
                                  const std::vector<std::uint32_t>& union_ids) {
  const Matrix nl = normalize_rows(zl);
  const Matrix nm = normalize_rows(zm);
  std::vector<double> sl, sm;
  for (std::uint32_t j : union_ids) {
    sl.push_back(nl.row(node).dot(nl.row(static_cast<Index>(j))));
    sm.push_back(nm.row(node).dot(nm.row(static_cast<Index>(j))));
  }
  double dot = 0.0, a2 = 0.0, b2 = 0.0;
  for (std::size_t t = 0; t < sl.size(); ++t) {
    dot += sl[t] * sm[t];
    a2 += sl[t] * sl[t];
    b2 += sm[t] * sm[t];
  }
  if (a2 == 0.0 || b2 == 0.0) return 0.0;
  return dot / (std::sqrt(a2) * std::sqrt(b2));
}

// Zachary's karate club graph, the classic 34-node fixture.
inline Graph karate() {
  static const std::pair<std::uint32_t, std::uint32_t> kEdges[] = {
      {0, 1},   {0, 2},   {0, 3},   {0, 4},   {0, 5},   {0, 6},   {0, 7},
      {0, 8},   {0, 10},  {0, 11},  {0, 12},  {0, 13},  {0, 17},  {0, 19},
      {0, 21},  {0, 31},  {1, 2},   {1, 3},   {1, 7},   {1, 13},  {1, 17},
      {1, 19},  {1, 21},  {1, 30},  {2, 3},   {2, 7},   {2, 8},   {2, 9},
      {2, 13},  {2, 27},  {2, 28},  {2, 32},  {3, 7},   {3, 12},  {3, 13},
      {4, 6},   {4, 10},  {5, 6},   {5, 10},  {5, 16},  {6, 16},  {8, 30},
      {8, 32},  {8, 33},  {9, 33},  {13, 33}, {14, 32}, {14, 33}, {15, 32},
      {15, 33}, {18, 32}, {18, 33}, {19, 33}, {20, 32}, {20, 33}, {22, 32},
      {22, 33}, {23, 25}, {23, 27}, {23, 29}, {23, 32}, {23, 33}, {24, 25},
      {24, 27}, {24, 31}, {25, 31}, {26, 29}, {26, 33}, {27, 33}, {28, 31},
      {28, 33}, {29, 32}, {29, 33}, {30, 32}, {30, 33}, {31, 32}, {31, 33},
      {32, 33}};
  std::vector<embstab::WeightedEdge> edges;
  for (const auto& [u, v] : kEdges) edges.push_back({u, v, 1.0});
  return Graph::from_edges(34, edges, false);
}

// Seeded planted-partition graph: `blocks` groups of `per_block` nodes,
// within-block edges with probability p_in, cross-block with p_out.
// Labels are the block indices.
struct PlantedPartition {
  Graph graph;
  embstab::NodeLabels labels;
};

inline PlantedPartition planted_partition(std::size_t blocks, std::size_t per_block,
                                          double p_in, double p_out,
                                          std::uint64_t seed) {
  const std::size_t n = blocks * per_block;
  embstab::Rng rng(seed);
  std::vector<embstab::WeightedEdge> edges;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v) {
      const bool same = u / per_block == v / per_block;
      if (rng.uniform() < (same ? p_in : p_out)) edges.push_back({u, v, 1.0});
    }
  PlantedPartition out{Graph::from_edges(n, edges, false), {}};
  out.labels.multi_label = false;
  out.labels.label_count = blocks;
  out.labels.assignments.resize(n);
  for (std::uint32_t v = 0; v < n; ++v)
    out.labels.assignments[v] = {static_cast<std::uint32_t>(v / per_block)};
  return out;
}

// Linearly separable class blobs in embedding space.
struct Blobs {
  Matrix points;
  embstab::NodeLabels labels;
};

inline Blobs blobs(std::size_t per_class, std::size_t classes, Index dim,
                   double spread, std::uint64_t seed) {
  embstab::Rng rng(seed);
  Blobs out;
  const std::size_t n = per_class * classes;
  out.points.resize(static_cast<Index>(n), dim);
  out.labels.multi_label = false;
  out.labels.label_count = classes;
  out.labels.assignments.resize(n);
  for (std::size_t c = 0; c < classes; ++c) {
    Eigen::RowVectorXd center(dim);
    for (Index j = 0; j < dim; ++j) center(j) = rng.gaussian() * 4.0;
    for (std::size_t i = 0; i < per_class; ++i) {
      const std::size_t row = c * per_class + i;
      for (Index j = 0; j < dim; ++j)
        out.points(static_cast<Index>(row), j) = center(j) + rng.gaussian() * spread;
      out.labels.assignments[row] = {static_cast<std::uint32_t>(c)};
    }
  }
  return out;
}

}  // namespace oracle
