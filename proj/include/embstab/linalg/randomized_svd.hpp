#pragma once

#include <cstdint>

#include "embstab/error.hpp"
#include "embstab/linalg/linear_operator.hpp"
#include "embstab/linalg/matrix.hpp"
#include "embstab/util/rng.hpp"

namespace embstab {

struct SvdFactors {
  Matrix u;      // dim x rank
  Vector sigma;  // rank, descending, non-negative
  Matrix v;      // dim x rank
  bool oversample_clamped = false;
};

namespace detail {

inline Matrix thin_q(const Matrix& y) {
  Eigen::HouseholderQR<Matrix> qr(y);
  Matrix q = Matrix::Identity(y.rows(), y.cols());
  q = qr.householderQ() * q;
  return q;
}

}  // namespace detail

/// Randomized truncated SVD with Gaussian range sketching and QR
/// re-orthonormalized power iterations. Only needs op.apply and
/// op.apply_transpose, never a dense copy of the operator.
inline SvdFactors randomized_svd(const LinearOperator& op, Index rank,
                                 Index oversample = 10, int power_iters = 4,
                                 std::uint64_t seed = 0) {
  const Index n = op.dim;
  if (rank < 1) throw ConfigError("svd rank must be at least 1");
  if (rank > n) throw ConfigError("svd rank exceeds operator dimension");
  if (oversample < 0) throw ConfigError("svd oversample must be non-negative");
  if (power_iters < 0) throw ConfigError("svd power iterations must be non-negative");

  SvdFactors out;
  Index l = rank + oversample;
  if (l > n) {
    l = n;
    out.oversample_clamped = true;
  }

  Rng rng(derive_seed(seed, 0x5fd1));
  Matrix omega(n, l);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < l; ++j) omega(i, j) = rng.gaussian();

  Matrix q = detail::thin_q(op.apply(omega));
  for (int it = 0; it < power_iters; ++it) {
    const Matrix z = detail::thin_q(op.apply_transpose(q));
    q = detail::thin_q(op.apply(z));
  }

  // B = Q^T A has the same top singular values as A restricted to range(Q).
  // Factor B through its transpose, which is tall and cheap to SVD.
  const Matrix bt = op.apply_transpose(q);  // n x l
  Eigen::JacobiSVD<Matrix> svd(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);

  if (!svd.singularValues().allFinite())
    throw NumericError("randomized svd produced non-finite singular values");

  out.u = q * svd.matrixV().leftCols(rank);
  out.sigma = svd.singularValues().head(rank);
  out.v = svd.matrixU().leftCols(rank);
  return out;
}

}  // namespace embstab
