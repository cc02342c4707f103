#include <doctest.h>

#include "sslab/spectral.hpp"

using namespace sslab;
using namespace sslab::spectral;

namespace {

Matrix random_symmetric(Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix a = rng.normal_matrix(d, d);
  return 0.5 * (a + a.transpose());
}

Matrix random_spd(Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix a = rng.normal_matrix(d, d);
  return a * a.transpose() + 0.1 * Matrix::Identity(d, d);
}

Matrix random_orthonormal(Eigen::Index d, Eigen::Index k, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(d, k));
  return Matrix(qr.householderQ()).leftCols(k);
}

}  // namespace

TEST_CASE("sym_eig identity") {
  const auto ep = sym_eig(Matrix::Identity(3, 3));
  CHECK(ep.values.isApprox(Vector::Ones(3)));
  CHECK(ep.basis.isApprox(Matrix::Identity(3, 3)));
}

TEST_CASE("sym_eig diagonal ordering") {
  Vector d(3);
  d << 2, 5, 3;
  const auto ep = sym_eig(Matrix(d.asDiagonal()));
  Vector want(3);
  want << 5, 3, 2;
  CHECK(ep.values.isApprox(want));
  // columns are the permuted standard basis with positive sign
  CHECK(ep.basis.col(0).isApprox(Vector::Unit(3, 1)));
  CHECK(ep.basis.col(1).isApprox(Vector::Unit(3, 2)));
  CHECK(ep.basis.col(2).isApprox(Vector::Unit(3, 0)));
}

TEST_CASE("sym_eig reconstruction") {
  const Matrix m = random_symmetric(8, 11);
  const auto ep = sym_eig(m);
  CHECK((ep.reconstruct() - m).norm() < 1e-9 * m.norm());
  CHECK((ep.basis.transpose() * ep.basis - Matrix::Identity(8, 8)).norm() < 1e-10);
  for (Eigen::Index i = 1; i < 8; ++i) CHECK(ep.values(i - 1) >= ep.values(i));
}

TEST_CASE("sym_eig rejects asymmetric input") {
  Matrix m = random_symmetric(4, 3);
  m(0, 1) += 1.0;
  CHECK_THROWS_AS(sym_eig(m), NonSymmetric);
}

TEST_CASE("sym_eig re-symmetrization idempotence") {
  Rng rng(17);
  Matrix m = random_symmetric(6, 5);
  m += 1e-12 * rng.normal_matrix(6, 6);  // within the symmetry tolerance
  const auto a = sym_eig(m);
  const auto b = sym_eig(Matrix(0.5 * (m + m.transpose())));
  CHECK((a.basis - b.basis).norm() < 1e-10);
  CHECK((a.values - b.values).norm() < 1e-10);
}

TEST_CASE("spd_inv_sqrt identity and diagonal") {
  CHECK(spd_inv_sqrt(Matrix::Identity(4, 4)).isApprox(Matrix::Identity(4, 4)));
  Vector d(2);
  d << 4, 9;
  Vector want(2);
  want << 0.5, 1.0 / 3.0;
  CHECK(spd_inv_sqrt(Matrix(d.asDiagonal())).isApprox(Matrix(want.asDiagonal())));
}

TEST_CASE("spd_inv_sqrt multiply-back") {
  const Matrix m = random_spd(6, 23);
  const Matrix a = spd_inv_sqrt(m);
  CHECK((a * m * a - Matrix::Identity(6, 6)).norm() < 1e-8);
}

TEST_CASE("spd_inv_sqrt singular handling") {
  Vector d(3);
  d << 4, 1, 0;
  const Matrix m = d.asDiagonal();
  // default: pseudo-inverse, zero eigenvalue maps to zero
  const Matrix a = spd_inv_sqrt(m);
  CHECK(a(0, 0) == doctest::Approx(0.5));
  CHECK(a(2, 2) == doctest::Approx(0.0));
  CHECK_THROWS_AS(spd_inv_sqrt(m, -1.0, true), SingularMatrix);
}

TEST_CASE("best_rank_k diagonal truncation") {
  Vector d(3);
  d << 3, 2, 1;
  const auto t = best_rank_k(Matrix(d.asDiagonal()), 2);
  Vector want(3);
  want << 3, 2, 0;
  CHECK(t.reconstruct().isApprox(Matrix(want.asDiagonal()), 1e-10));
}

TEST_CASE("best_rank_k full rank is exact") {
  Rng rng(31);
  const Matrix a = rng.normal_matrix(5, 5);
  CHECK((best_rank_k(a, 5).reconstruct() - a).norm() < 1e-10 * a.norm());
}

TEST_CASE("best_rank_k error non-increasing in k") {
  Rng rng(37);
  const Matrix a = rng.normal_matrix(7, 7);
  double prev = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 1; k <= 7; ++k) {
    const double err = (best_rank_k(a, k).reconstruct() - a).norm();
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
}

TEST_CASE("best_rank_k rank bounds") {
  const Matrix a = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(best_rank_k(a, 0), RankOutOfRange);
  CHECK_THROWS_AS(best_rank_k(a, 4), RankOutOfRange);
}

TEST_CASE("subspace_distance basic values") {
  const Matrix b = random_orthonormal(5, 2, 41);
  CHECK(subspace_distance(b, b) == doctest::Approx(0.0));
  Matrix e1 = Vector::Unit(2, 0), e2 = Vector::Unit(2, 1);
  CHECK(subspace_distance(e1, e2) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("subspace_distance rotation invariance") {
  const Matrix b = random_orthonormal(6, 3, 43);
  const Matrix u = random_orthonormal(3, 3, 47);
  CHECK(subspace_distance(b, b * u) < 1e-10);
}

TEST_CASE("subspace_distance pseudometric") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix a = random_orthonormal(6, 2, 100 + s);
    const Matrix b = random_orthonormal(6, 2, 200 + s);
    const Matrix c = random_orthonormal(6, 2, 300 + s);
    CHECK(subspace_distance(a, b) == doctest::Approx(subspace_distance(b, a)));
    CHECK(subspace_distance(a, c) <=
          subspace_distance(a, b) + subspace_distance(b, c) + 1e-9);
  }
}

TEST_CASE("subspace_distance input checks") {
  const Matrix b = random_orthonormal(5, 2, 53);
  CHECK_THROWS_AS(subspace_distance(b, random_orthonormal(4, 2, 59)),
                  DimensionMismatch);
  CHECK_THROWS_AS(subspace_distance(2.0 * b, b), Error);  // not orthonormal
}

TEST_CASE("row_space_basis spans the rows") {
  Rng rng(61);
  const Matrix a = rng.normal_matrix(3, 7);
  const Matrix b = row_space_basis(a);
  CHECK(b.rows() == 7);
  CHECK(b.cols() == 3);
  CHECK((b.transpose() * b - Matrix::Identity(3, 3)).norm() < 1e-10);
  // every row of a lies in the span of b's columns
  const Matrix proj = b * b.transpose();
  CHECK((a * proj - a).norm() < 1e-9 * a.norm());
}
