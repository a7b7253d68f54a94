#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "embstab/error.hpp"
#include "embstab/geometry/knn.hpp"
#include "embstab/linalg/matrix.hpp"
#include "embstab/linalg/normalize.hpp"
#include "embstab/linalg/procrustes.hpp"

namespace embstab {

enum class Measure { aligned_cosine, knn_jaccard, second_order_cosine };

inline const char* measure_name(Measure m) {
  switch (m) {
    case Measure::aligned_cosine: return "aligned_cosine";
    case Measure::knn_jaccard: return "knn_jaccard";
    case Measure::second_order_cosine: return "second_order_cosine";
  }
  return "?";
}

/// Per-node scores for one pair of runs. Flagged nodes (zero vectors, or
/// degenerate similarity profiles for the second-order measure) carry value 0
/// and are excluded from every aggregate.
struct PairwiseNodeScores {
  Measure measure{};
  std::vector<double> values;
  std::vector<std::uint8_t> flagged;
  bool degenerate_alignment = false;  // Procrustes factor was not unique

  std::size_t node_count() const { return values.size(); }
};

inline double cosine_similarity(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                                const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

/// Rotation/reflection-invariant per-node agreement: rows are normalized
/// (optionally after centering the columns), one embedding is rotated onto
/// the other by orthogonal Procrustes, and each node scores the cosine
/// between its two aligned unit vectors.
inline PairwiseNodeScores aligned_cosine_similarity(const Matrix& zl, const Matrix& zm,
                                                    bool center = false) {
  if (zl.rows() != zm.rows() || zl.cols() != zm.cols())
    throw DimensionError("embedding pair disagrees on shape");
  if (zl.rows() == 0) throw InsufficientDataError("empty embeddings");

  auto prep = [center](const Matrix& z) {
    if (!center) return row_normalize(z);
    Matrix c = z;
    c.rowwise() -= z.colwise().mean();
    return row_normalize(c);
  };
  const RowNormalized a = prep(zl);
  const RowNormalized b = prep(zm);
  const ProcrustesResult pr = procrustes_align(a.matrix, b.matrix);

  PairwiseNodeScores out;
  out.measure = Measure::aligned_cosine;
  out.degenerate_alignment = pr.degenerate;
  const auto n = zl.rows();
  out.values.assign(static_cast<std::size_t>(n), 0.0);
  out.flagged.assign(static_cast<std::size_t>(n), 0);
  const Matrix rotated = a.matrix * pr.q;
  for (Index i = 0; i < n; ++i) {
    const auto iz = static_cast<std::size_t>(i);
    if (a.zero_row[iz] || b.zero_row[iz]) {
      out.flagged[iz] = 1;
      continue;
    }
    // Rows are unit length, so the plain dot is already the cosine.
    out.values[iz] = rotated.row(i).dot(b.matrix.row(i));
  }
  return out;
}

/// Jaccard overlap of the two k-nearest-neighbor sets per node.
inline PairwiseNodeScores knn_jaccard(const KnnTable& a, const KnnTable& b) {
  if (a.neighbors.size() != b.neighbors.size())
    throw DimensionError("knn tables disagree on node count");
  if (a.k != b.k) throw ConfigError("knn tables disagree on k");

  PairwiseNodeScores out;
  out.measure = Measure::knn_jaccard;
  const std::size_t n = a.neighbors.size();
  out.values.assign(n, 0.0);
  out.flagged.assign(n, 0);
  std::vector<std::uint32_t> sa, sb;
  for (std::size_t i = 0; i < n; ++i) {
    if (a.flagged[i] || b.flagged[i]) {
      out.flagged[i] = 1;
      continue;
    }
    sa.assign(a.neighbors[i].begin(), a.neighbors[i].end());
    sb.assign(b.neighbors[i].begin(), b.neighbors[i].end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::size_t inter = 0, ia = 0, ib = 0;
    while (ia < sa.size() && ib < sb.size()) {
      if (sa[ia] == sb[ib]) {
        ++inter;
        ++ia;
        ++ib;
      } else if (sa[ia] < sb[ib]) {
        ++ia;
      } else {
        ++ib;
      }
    }
    const std::size_t uni = sa.size() + sb.size() - inter;
    out.values[i] = static_cast<double>(inter) / static_cast<double>(uni);
  }
  return out;
}

inline PairwiseNodeScores knn_jaccard(const Matrix& zl, const Matrix& zm, int k = 20) {
  return knn_jaccard(knn(zl, k), knn(zm, k));
}

/// Second-order cosine: for each node, both runs score its similarity to the
/// union of the two k-NN sets (union ordered by ascending id), and the node's
/// value is the cosine between those two similarity profiles. Captures
/// whether the local similarity structure agrees even when the sets differ.
inline PairwiseNodeScores second_order_cosine(const Matrix& zl_norm,
                                              const std::vector<std::uint8_t>& zl_zero,
                                              const Matrix& zm_norm,
                                              const std::vector<std::uint8_t>& zm_zero,
                                              const KnnTable& ka, const KnnTable& kb) {
  const auto n = zl_norm.rows();
  if (zm_norm.rows() != n || zl_norm.cols() != zm_norm.cols())
    throw DimensionError("embedding pair disagrees on shape");
  if (ka.neighbors.size() != static_cast<std::size_t>(n) ||
      kb.neighbors.size() != static_cast<std::size_t>(n))
    throw DimensionError("knn tables disagree with embeddings");

  PairwiseNodeScores out;
  out.measure = Measure::second_order_cosine;
  out.values.assign(static_cast<std::size_t>(n), 0.0);
  out.flagged.assign(static_cast<std::size_t>(n), 0);

  std::vector<std::uint32_t> uni;
  Eigen::RowVectorXd sa, sb;
  for (Index i = 0; i < n; ++i) {
    const auto iz = static_cast<std::size_t>(i);
    if (zl_zero[iz] || zm_zero[iz]) {
      out.flagged[iz] = 1;
      continue;
    }
    uni.assign(ka.neighbors[iz].begin(), ka.neighbors[iz].end());
    uni.insert(uni.end(), kb.neighbors[iz].begin(), kb.neighbors[iz].end());
    std::sort(uni.begin(), uni.end());
    uni.erase(std::unique(uni.begin(), uni.end()), uni.end());

    sa.resize(static_cast<Index>(uni.size()));
    sb.resize(static_cast<Index>(uni.size()));
    for (std::size_t j = 0; j < uni.size(); ++j) {
      sa(static_cast<Index>(j)) = zl_norm.row(i).dot(zl_norm.row(uni[j]));
      sb(static_cast<Index>(j)) = zm_norm.row(i).dot(zm_norm.row(uni[j]));
    }
    const double na = sa.norm(), nb = sb.norm();
    if (na == 0.0 || nb == 0.0) {
      out.flagged[iz] = 1;
      continue;
    }
    out.values[iz] = sa.dot(sb) / (na * nb);
  }
  return out;
}

inline PairwiseNodeScores second_order_cosine(const Matrix& zl, const Matrix& zm,
                                              int k = 20) {
  const RowNormalized a = row_normalize(zl);
  const RowNormalized b = row_normalize(zm);
  const KnnTable ka = knn_from_normalized(a.matrix, a.zero_row, k);
  const KnnTable kb = knn_from_normalized(b.matrix, b.zero_row, k);
  return second_order_cosine(a.matrix, a.zero_row, b.matrix, b.zero_row, ka, kb);
}

}  // namespace embstab
