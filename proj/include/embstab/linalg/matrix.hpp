#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "embstab/util/digest.hpp"

namespace embstab {

// Row-major so that one node's embedding vector is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// Fingerprint over shape and exact bit patterns.
inline std::uint64_t matrix_digest(const Matrix& m) {
  Digest d;
  d.pod(static_cast<std::int64_t>(m.rows()));
  d.pod(static_cast<std::int64_t>(m.cols()));
  d.bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  return d.value();
}

}  // namespace embstab
