#include <doctest.h>

#include <random>

#include "lsfem/linalg.hpp"

using namespace lsfem;

namespace {

DenseMatrix random_spd(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  DenseMatrix R(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) R(i, j) = d(rng);
  }
  return R * R.transpose() + static_cast<double>(n) * DenseMatrix::Identity(n, n);
}

}  // namespace

TEST_CASE("make_sparse sums duplicates and drops zeros") {
  const SparseMatrix A = make_sparse(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, 1.0}, {1, 0, -1.0}, {1, 1, 4.0}});
  CHECK(A.nonZeros() == 2);
  CHECK(A.coeff(0, 0) == 3.0);
  CHECK(!is_symmetric(make_sparse(2, 2, {{0, 1, 1.0}})));
}

TEST_CASE("PCG on a 2x2 system") {
  DenseMatrix A(2, 2);
  A << 4, 1, 1, 3;
  Vector b(2);
  b << 1, 2;
  const PcgResult r = pcg(make_operator(A, true), b, identity_operator(2), 1e-14);
  CHECK(r.x[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-13));
  CHECK(r.x[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-13));
  CHECK(r.iterations <= 2);
}

TEST_CASE("PCG matches dense solves on random SPD systems") {
  std::mt19937_64 rng(7);
  for (Eigen::Index n : {5, 20, 60}) {
    const DenseMatrix A = random_spd(n, rng);
    const Vector b = Vector::LinSpaced(n, -1.0, 2.0);
    const Vector ref = dense_solve(A, b, true);
    const Vector diag = A.diagonal().cwiseInverse();
    LinearOperator jac = identity_operator(n);
    jac.apply = [diag](const Vector& x, Vector& y) { y = diag.cwiseProduct(x); };
    const PcgResult r = pcg(make_operator(A, true), b, jac, 1e-12);
    CHECK((r.x - ref).norm() / ref.norm() < 1e-8);
    CHECK((A.llt().solve(b) - ref).norm() / ref.norm() < 1e-12);
  }
}

TEST_CASE("PCG reports failure with its best iterate") {
  DenseMatrix A = DenseMatrix::Identity(4, 4);
  A(3, 3) = 1e6;
  const Vector b = Vector::Ones(4);
  CHECK_THROWS_AS(pcg(make_operator(A, true), b, identity_operator(4), 1e-14, 1), PcgError);
}

TEST_CASE("dense solve of a symmetric indefinite system") {
  DenseMatrix K(3, 3);
  K << 2, 0, 1, 0, 1, 1, 1, 1, -1;
  const Vector b = Vector::Ones(3);
  const Vector x = dense_solve(K, b, true);
  CHECK((K * x - b).norm() < 1e-14);
  CHECK_THROWS_AS(dense_solve(DenseMatrix::Zero(2, 2), Vector::Ones(2), true), LinalgError);
}

TEST_CASE("generalized eigenvalues: dense path and LOBPCG agree") {
  std::mt19937_64 rng(11);
  const Eigen::Index n = 80;
  const DenseMatrix A = random_spd(n, rng);
  const DenseMatrix B = random_spd(n, rng);
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> ref(A, B, Eigen::EigenvaluesOnly);
  const EigRange dense = extreme_geneig(make_operator(A, true), make_operator(B, true));
  const EigRange iter = extreme_geneig(make_operator(A, true), make_operator(B, true), 4, 10);
  CHECK(dense.min == doctest::Approx(ref.eigenvalues().minCoeff()).epsilon(1e-10));
  CHECK(dense.max == doctest::Approx(ref.eigenvalues().maxCoeff()).epsilon(1e-10));
  CHECK(iter.min == doctest::Approx(ref.eigenvalues().minCoeff()).epsilon(1e-6));
  CHECK(iter.max == doctest::Approx(ref.eigenvalues().maxCoeff()).epsilon(1e-6));
}

TEST_CASE("spectrum of a product of SPD matrices") {
  DenseMatrix G(2, 2);
  G << 2, 0, 0, 0.5;
  const SparseMatrix A = make_sparse(2, 2, {{0, 0, 1.0}, {1, 1, 3.0}});
  const EigRange r = spectrum_of_product(make_operator(G, true), A);
  CHECK(r.min == doctest::Approx(1.5));
  CHECK(r.max == doctest::Approx(2.0));
}

TEST_CASE("log-log slopes") {
  const std::vector<double> x{1, 2, 4, 8, 16};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.5));
  CHECK(loglog_slope(x, y, 3) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(loglog_slope(x, y, 99) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK_THROWS_AS(loglog_slope(x, y, 1), LinalgError);
}
