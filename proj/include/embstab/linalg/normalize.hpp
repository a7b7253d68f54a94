#pragma once

#include <cstdint>
#include <vector>

#include "embstab/error.hpp"
#include "embstab/linalg/matrix.hpp"

namespace embstab {

struct RowNormalized {
  Matrix matrix;
  std::vector<std::uint8_t> zero_row;  // 1 where the input row had norm 0
  std::size_t zero_count = 0;
};

/// Scales every row to unit L2 norm. Zero rows are left as zeros and flagged
/// instead of producing NaN; downstream measures exclude flagged nodes.
inline RowNormalized row_normalize(const Matrix& m) {
  if (!all_finite(m)) throw NumericError("matrix contains non-finite values");
  RowNormalized out;
  out.matrix = m;
  out.zero_row.assign(static_cast<std::size_t>(m.rows()), 0);
  for (Index i = 0; i < m.rows(); ++i) {
    const double norm = out.matrix.row(i).norm();
    if (norm > 0.0) {
      out.matrix.row(i) /= norm;
    } else {
      out.zero_row[static_cast<std::size_t>(i)] = 1;
      ++out.zero_count;
    }
  }
  return out;
}

}  // namespace embstab
