#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "embstab/linalg/linear_operator.hpp"
#include "embstab/linalg/matrix.hpp"
#include "embstab/linalg/normalize.hpp"
#include "embstab/linalg/procrustes.hpp"
#include "embstab/linalg/randomized_svd.hpp"
#include "support/oracles.hpp"

using namespace embstab;

TEST_CASE("row normalization scales rows and flags zeros", "[linalg]") {
  Matrix m(3, 2);
  m << 3.0, 4.0, 0.0, 0.0, -1.0, 0.0;
  const auto out = row_normalize(m);
  CHECK(out.matrix(0, 0) == Catch::Approx(0.6).epsilon(1e-12));
  CHECK(out.matrix(0, 1) == Catch::Approx(0.8).epsilon(1e-12));
  CHECK(out.matrix(1, 0) == 0.0);
  CHECK(out.matrix(1, 1) == 0.0);
  CHECK(out.matrix(2, 0) == -1.0);
  CHECK(out.zero_row == std::vector<std::uint8_t>{0, 1, 0});
  CHECK(out.zero_count == 1);

  Matrix bad(1, 2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(row_normalize(bad), NumericError);
}

TEST_CASE("matrix digest separates close matrices", "[linalg]") {
  Matrix a = Matrix::Zero(2, 2);
  Matrix b = a;
  CHECK(matrix_digest(a) == matrix_digest(b));
  b(1, 1) = 1e-17;
  CHECK(matrix_digest(a) != matrix_digest(b));
  Matrix c = Matrix::Zero(4, 1);  // same bytes, different shape
  CHECK(matrix_digest(a) != matrix_digest(c));
}

TEST_CASE("dense operator applies the matrix and passes the linearity check", "[linalg]") {
  Matrix a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  const auto op = dense_operator(a);
  Matrix x(2, 1);
  x << 1.0, 1.0;
  const Matrix y = op.apply(x);
  CHECK(y(0, 0) == Catch::Approx(3.0));
  CHECK(y(1, 0) == Catch::Approx(7.0));
  const Matrix yt = op.apply_transpose(x);
  CHECK(yt(0, 0) == Catch::Approx(4.0));
  CHECK(yt(1, 0) == Catch::Approx(6.0));
  CHECK(linearity_defect(op, 11) < 1e-12);

  Matrix rect(2, 3);
  CHECK_THROWS_AS(dense_operator(rect), DimensionError);
}

TEST_CASE("randomized svd recovers an exact low rank diagonal", "[linalg]") {
  Matrix a = Matrix::Zero(6, 6);
  a(0, 0) = 3.0;
  a(1, 1) = 2.0;
  a(2, 2) = 1.0;
  const auto f = randomized_svd(dense_operator(a), 2, 10, 4, 123);
  REQUIRE(f.sigma.size() == 2);
  CHECK(f.sigma(0) == Catch::Approx(3.0).margin(1e-10));
  CHECK(f.sigma(1) == Catch::Approx(2.0).margin(1e-10));
  // Reconstruction error equals the first dropped singular value.
  const Matrix recon = f.u * f.sigma.asDiagonal() * f.v.transpose();
  const double err = (a - recon).norm();
  CHECK(err == Catch::Approx(1.0).margin(1e-9));
  // Columns of u orthonormal.
  const Matrix gram = f.u.transpose() * f.u;
  CHECK((gram - Matrix::Identity(2, 2)).norm() < 1e-10);
}

TEST_CASE("randomized svd on the zero operator returns zero factors", "[linalg]") {
  const auto f = randomized_svd(dense_operator(Matrix::Zero(5, 5)), 3, 10, 4, 5);
  REQUIRE(f.sigma.size() == 3);
  for (Index i = 0; i < 3; ++i) CHECK(f.sigma(i) == Catch::Approx(0.0).margin(1e-14));
  CHECK(all_finite(f.u));
  CHECK(all_finite(f.v));
}

TEST_CASE("randomized svd tracks a jacobi reference on a symmetric matrix", "[linalg]") {
  const Index n = 40;
  Matrix g = oracle::gaussian_matrix(n, n, 909);
  Matrix a = 0.5 * (g + g.transpose());
  const auto ref = oracle::jacobi_singular_values(a);
  const Index rank = 8;
  // Power iterations sharpen the subspace enough for a tight match.
  const auto f = randomized_svd(dense_operator(a), rank, 10, 6, 42);
  for (Index i = 0; i < rank; ++i) {
    CAPTURE(i);
    CHECK(f.sigma(i) == Catch::Approx(ref[static_cast<std::size_t>(i)]).epsilon(1e-6));
  }
}

TEST_CASE("randomized svd clamps oversampling at the operator dimension", "[linalg]") {
  Matrix a = Matrix::Identity(4, 4);
  const auto f = randomized_svd(dense_operator(a), 3, 10, 2, 7);
  CHECK(f.oversample_clamped);
  for (Index i = 0; i < 3; ++i) CHECK(f.sigma(i) == Catch::Approx(1.0).margin(1e-10));

  CHECK_THROWS_AS(randomized_svd(dense_operator(a), 0, 10, 4, 1), ConfigError);
  CHECK_THROWS_AS(randomized_svd(dense_operator(a), 5, 10, 4, 1), ConfigError);
  CHECK_THROWS_AS(randomized_svd(dense_operator(a), 2, -1, 4, 1), ConfigError);
  CHECK_THROWS_AS(randomized_svd(dense_operator(a), 2, 10, -1, 1), ConfigError);
}

TEST_CASE("procrustes returns identity for identical inputs", "[linalg]") {
  const Matrix z = oracle::gaussian_matrix(20, 4, 31);
  const auto r = procrustes_align(z, z);
  CHECK((r.q - Matrix::Identity(4, 4)).norm() < 1e-8);
  CHECK_FALSE(r.degenerate);
  // q orthogonal.
  CHECK((r.q * r.q.transpose() - Matrix::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("procrustes recovers a planted rotation", "[linalg]") {
  const Matrix z = oracle::gaussian_matrix(30, 3, 77);
  // Rotation about the z axis by 0.7 radians.
  Matrix rot = Matrix::Identity(3, 3);
  const double c = std::cos(0.7), s = std::sin(0.7);
  rot(0, 0) = c;
  rot(0, 1) = -s;
  rot(1, 0) = s;
  rot(1, 1) = c;
  const Matrix zr = z * rot;
  const auto r = procrustes_align(z, zr);
  CHECK((r.q - rot).norm() < 1e-8);
  CHECK((z * r.q - zr).norm() < 1e-8);
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("procrustes matches an exhaustive 2d grid search", "[linalg]") {
  const Matrix a = oracle::gaussian_matrix(5, 2, 13);
  const Matrix b = oracle::gaussian_matrix(5, 2, 14);
  const auto r = procrustes_align(a, b);
  const double lib_residual = (a * r.q - b).norm();
  const Eigen::Matrix2d grid_q = oracle::grid_procrustes_2d(a, b);
  const double grid_residual = (a * grid_q - b).norm();
  CHECK(lib_residual <= grid_residual + 1e-3);
}

TEST_CASE("procrustes flags a degenerate cross matrix", "[linalg]") {
  // Rank one inputs: zl^T zm is rank deficient, alignment not unique.
  Matrix zl = Matrix::Zero(6, 3);
  Matrix zm = Matrix::Zero(6, 3);
  for (Index i = 0; i < 6; ++i) {
    zl(i, 0) = static_cast<double>(i + 1);
    zm(i, 0) = static_cast<double>(i + 1);
  }
  const auto r = procrustes_align(zl, zm);
  CHECK(r.degenerate);
  CHECK((r.q * r.q.transpose() - Matrix::Identity(3, 3)).norm() < 1e-10);

  const auto zeros = procrustes_align(Matrix::Zero(4, 2), Matrix::Zero(4, 2));
  CHECK(zeros.degenerate);

  Matrix small(2, 2), tall(3, 2);
  CHECK_THROWS_AS(procrustes_align(small, tall), DimensionError);
}
