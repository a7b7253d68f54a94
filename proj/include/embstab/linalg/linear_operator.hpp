#pragma once

#include <functional>
#include <memory>
#include <utility>

#include "embstab/error.hpp"
#include "embstab/linalg/matrix.hpp"
#include "embstab/util/rng.hpp"

namespace embstab {

/// A square linear map given by its action on blocks of vectors. Lets the
/// randomized SVD factor matrices (like Katz similarity) that are never
/// formed densely.
struct LinearOperator {
  Index dim = 0;
  std::function<Matrix(const Matrix&)> apply;            // X (dim x b) -> A X
  std::function<Matrix(const Matrix&)> apply_transpose;  // X (dim x b) -> A^T X
};

inline LinearOperator dense_operator(Matrix a) {
  if (a.rows() != a.cols()) throw DimensionError("dense_operator needs a square matrix");
  auto shared = std::make_shared<Matrix>(std::move(a));
  LinearOperator op;
  op.dim = shared->rows();
  op.apply = [shared](const Matrix& x) -> Matrix { return (*shared) * x; };
  op.apply_transpose = [shared](const Matrix& x) -> Matrix {
    return shared->transpose() * x;
  };
  return op;
}

/// Randomized additivity probe: ||A(x+y) - Ax - Ay|| relative to the result
/// scale. Near machine epsilon for anything actually linear; test hook.
inline double linearity_defect(const LinearOperator& op, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(op.dim, 1), y(op.dim, 1);
  for (Index i = 0; i < op.dim; ++i) {
    x(i, 0) = rng.gaussian();
    y(i, 0) = rng.gaussian();
  }
  const Matrix sum = op.apply(x + y);
  const Matrix parts = op.apply(x) + op.apply(y);
  const double scale = std::max(1.0, std::max(sum.norm(), parts.norm()));
  return (sum - parts).norm() / scale;
}

}  // namespace embstab
