#include <doctest.h>

#include "sslab/oracle.hpp"
#include "sslab/solvers.hpp"
#include "sslab/spectral.hpp"

using namespace sslab;
using namespace sslab::oracle;

namespace {

datamodel::SpectralSpec two_dim_spec(double lg) {
  datamodel::SpectralSpec spec;
  spec.n = 10;
  spec.d = 2;
  spec.k = 1;
  spec.c = {1.0};
  spec.lambda_theta = {1.0, 0.5};
  spec.lambda_gamma = {0.0, lg};
  spec.seed = 0;
  return spec;
}

}  // namespace

TEST_CASE("joint-embedding oracle matches the diagonal closed form") {
  augmentation::MomentPair mp;
  Vector s(2), g(2);
  s << 3, 1;
  g << 2, 0;
  mp.s = s.asDiagonal();
  mp.g = g.asDiagonal();
  const auto closed = solvers::solve_joint_embedding(mp, 1);
  const Matrix w = oracle_joint_embedding(mp, 1);
  CHECK(spectral::subspace_distance(spectral::row_space_basis(closed.w),
                                    spectral::row_space_basis(w)) < 1e-6);
  CHECK((w * mp.s * w.transpose() - Matrix::Identity(1, 1)).norm() < 1e-6);
}

TEST_CASE("joint-embedding oracle on proportional moments") {
  // G = c S: every feasible W is optimal and the objective equals c*k.
  Rng rng(3);
  const Matrix a = rng.normal_matrix(4, 4);
  augmentation::MomentPair mp;
  mp.s = a * a.transpose() + Matrix::Identity(4, 4);
  mp.g = 0.3 * mp.s;
  const Matrix w = oracle_joint_embedding(mp, 2);
  CHECK((w * mp.g * w.transpose()).trace() == doctest::Approx(0.6).epsilon(1e-8));
}

TEST_CASE("reconstruction oracle matches the diagonal closed form") {
  Matrix x(2, 2);
  x << std::sqrt(2.0), 0.0, -std::sqrt(2.0), 0.0;
  const auto [e, d] = oracle_reconstruction(x, Matrix::Identity(2, 2), 1);
  Vector want(2);
  want << 2.0 / 3.0, 0.0;
  CHECK((d * e - Matrix(want.asDiagonal())).norm() < 1e-6);
}

TEST_CASE("reconstruction oracle without regularization reaches zero error") {
  Rng rng(5);
  const Matrix x = rng.normal_matrix(12, 3);
  const auto [e, d] = oracle_reconstruction(x, Matrix::Zero(3, 3), 3);
  CHECK((x - x * (d * e).transpose()).norm() < 1e-5 * x.norm());
}

TEST_CASE("supervised oracle, deterministic augmentation reduces to least squares") {
  Rng rng(7);
  const Matrix x = rng.normal_matrix(20, 3);
  const Matrix y = rng.normal_matrix(20, 1);
  augmentation::AugmentationModel none;
  none.theta = Matrix::Zero(3, 3);
  none.gamma = Matrix::Zero(3, 3);
  OracleOptions opts;
  opts.max_iters = 4000;
  const Matrix v = oracle_supervised(x, y, none, opts);
  const Matrix ols = solvers::solve_supervised(x, y, Matrix::Zero(3, 3)).v;
  CHECK((v - ols).norm() < 1e-6 * std::max(1.0, ols.norm()));
}

TEST_CASE("supervised oracle recovers the scalar example") {
  Matrix x(2, 1);
  x << 1.0, -1.0;
  augmentation::AugmentationModel m;
  m.theta = Matrix::Identity(1, 1);
  m.gamma = Matrix::Zero(1, 1);
  m.alpha = 0.0;
  OracleOptions opts;
  opts.max_iters = 4000;
  opts.seed = 11;
  const Matrix v = oracle_supervised(x, x, m, opts);
  CHECK(std::abs(v(0, 0) - 0.5) < 1e-3);
}

TEST_CASE("threshold bisection recovers the closed-form alphas") {
  const auto spec = two_dim_spec(4.0);
  const double je = threshold_search(theory::Method::JointEmbedding, spec, 0.0, 10.0);
  CHECK(je == doctest::Approx(std::sqrt(0.875)).epsilon(1e-8));
  const double rc = threshold_search(theory::Method::Reconstruction, spec, 0.0, 10.0);
  CHECK(rc == doctest::Approx(std::sqrt(6.875)).epsilon(1e-8));
}

TEST_CASE("threshold bisection needs a bracket") {
  // weak-noise spec: RC threshold is negative, predicate true everywhere
  const auto spec = two_dim_spec(0.8);
  CHECK_THROWS_AS(threshold_search(theory::Method::Reconstruction, spec, 0.0, 10.0),
                  NoBracket);
  CHECK_THROWS_AS(threshold_search(theory::Method::Supervised, spec, 0.0, 10.0),
                  NoBracket);
  CHECK_THROWS_AS(
      threshold_search(theory::Method::JointEmbedding, spec, 1.0, 0.0),
      SpecInvalid);
}
