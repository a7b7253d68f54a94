#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "embstab/error.hpp"
#include "embstab/linalg/matrix.hpp"
#include "embstab/linalg/normalize.hpp"

namespace embstab {

/// Exact cosine k-nearest-neighbor lists. neighbors[i] holds node i's k
/// highest-cosine peers, sorted by descending similarity with ascending id
/// breaking ties. Zero-vector nodes are flagged: they appear with empty
/// lists and are excluded as candidates everywhere.
struct KnnTable {
  int k = 0;
  std::vector<std::vector<std::uint32_t>> neighbors;
  std::vector<std::uint8_t> flagged;
};

/// zn must be row-normalized; zero_flags marks rows that had norm zero.
inline KnnTable knn_from_normalized(const Matrix& zn,
                                    const std::vector<std::uint8_t>& zero_flags,
                                    int k) {
  const auto n = zn.rows();
  if (k < 1) throw ConfigError("knn needs k >= 1");
  if (static_cast<Index>(k) >= n)
    throw ConfigError("knn needs k < node count");
  if (zero_flags.size() != static_cast<std::size_t>(n))
    throw DimensionError("zero flag vector does not match matrix rows");

  std::size_t valid = 0;
  for (auto f : zero_flags) valid += f == 0;
  if (valid == 0) throw NumericError("embedding has no nonzero rows");

  KnnTable out;
  out.k = k;
  out.flagged = zero_flags;
  out.neighbors.assign(static_cast<std::size_t>(n), {});

  // Blocked similarity rows keep the working set small; per row we select
  // the top k by (similarity desc, id asc).
  const Index block = 256;
  std::vector<std::uint32_t> candidates;
  candidates.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    if (!zero_flags[static_cast<std::size_t>(i)])
      candidates.push_back(static_cast<std::uint32_t>(i));
  if (candidates.size() <= static_cast<std::size_t>(k))
    throw InsufficientDataError("fewer than k + 1 nonzero embedding rows");

  std::vector<std::uint32_t> pool;
  for (Index r0 = 0; r0 < n; r0 += block) {
    const Index rows = std::min(block, n - r0);
    const Matrix sims = zn.middleRows(r0, rows) * zn.transpose();
    for (Index r = 0; r < rows; ++r) {
      const auto i = static_cast<std::uint32_t>(r0 + r);
      if (zero_flags[i]) continue;
      const double* s = sims.data() + static_cast<std::size_t>(r) * n;
      pool.clear();
      for (std::uint32_t c : candidates)
        if (c != i) pool.push_back(c);
      auto better = [s](std::uint32_t a, std::uint32_t b) {
        return s[a] != s[b] ? s[a] > s[b] : a < b;
      };
      std::nth_element(pool.begin(), pool.begin() + k, pool.end(), better);
      pool.resize(static_cast<std::size_t>(k));
      std::sort(pool.begin(), pool.end(), better);
      out.neighbors[i] = pool;
    }
  }
  return out;
}

inline KnnTable knn(const Matrix& z, int k) {
  const RowNormalized rn = row_normalize(z);
  return knn_from_normalized(rn.matrix, rn.zero_row, k);
}

}  // namespace embstab
