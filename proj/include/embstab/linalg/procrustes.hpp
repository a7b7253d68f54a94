#pragma once

#include <limits>

#include "embstab/error.hpp"
#include "embstab/linalg/matrix.hpp"

namespace embstab {

struct ProcrustesResult {
  Matrix q;                 // d x d orthogonal, minimizes ||zl q - zm||_F
  bool degenerate = false;  // cross matrix was rank deficient; q not unique
};

/// Orthogonal Procrustes alignment between two embeddings of the same nodes.
/// q = U V^T from the SVD of zl^T zm. Rotations and reflections both allowed,
/// which is what makes the aligned cosine measure invariant to the arbitrary
/// orthogonal factor a training run picks.
inline ProcrustesResult procrustes_align(const Matrix& zl, const Matrix& zm) {
  if (zl.rows() != zm.rows() || zl.cols() != zm.cols())
    throw DimensionError("procrustes inputs must have identical shape");
  if (!all_finite(zl) || !all_finite(zm))
    throw NumericError("procrustes inputs contain non-finite values");

  const Matrix cross = zl.transpose() * zm;  // d x d
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);

  ProcrustesResult out;
  out.q = svd.matrixU() * svd.matrixV().transpose();
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double smin = s.size() > 0 ? s(s.size() - 1) : 0.0;
  const double tol =
      static_cast<double>(cross.rows()) * std::numeric_limits<double>::epsilon() * smax;
  out.degenerate = smax <= 0.0 || smin <= tol;
  return out;
}

}  // namespace embstab
