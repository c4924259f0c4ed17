#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lsfem/assembly.hpp"
#include "lsfem/precond.hpp"

using namespace lsfem;

TEST_CASE("multilevel H1 V-cycle is symmetric and spectrally equivalent") {
  const MeshPtr m = refine_times(make_cauchy_initial(), 5);
  const FeSpace V = p1_space(m, {BoundaryTag::SigmaComplement});
  const MultilevelH1 ml(p1_hierarchy(V));
  CHECK(ml.levels() == 6);
  const DenseMatrix G = to_dense(ml.op());
  CHECK((G - G.transpose()).cwiseAbs().maxCoeff() < 1e-12 * G.cwiseAbs().maxCoeff());
  const EigRange r = spectrum_of_product(ml.op(), assemble({FormKind::H1Gram}, V, V));
  CHECK(r.min > 0.5);
  CHECK(r.max <= 1.0 + 1e-10);
}

TEST_CASE("V-cycle prolongations reproduce coarse functions") {
  const MeshPtr m = refine_times(make_cauchy_initial(), 3);
  const MultilevelH1 ml(p1_hierarchy(p1_space(m)));
  for (std::size_t l = 0; l + 1 < ml.levels(); ++l) {
    const Vector one = Vector::Ones(static_cast<Eigen::Index>(ml.space(l).size()));
    CHECK((ml.prolongation(l) * one - Vector::Ones(ml.prolongation(l).rows())).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("Haar H^{-1/2} preconditioner is SPD and scales like h") {
  const IntervalMeshPtr c = make_interval_mesh(0.0, std::numbers::pi, 3);
  IntervalMeshPtr f = c;
  for (int k = 0; k < 4; ++k) f = red_refine_interval(f);
  const MultilevelHminusHalf G(interval_chain(c, f));
  CHECK(G.levels() == 5);
  const DenseMatrix D = to_dense(G.op());
  CHECK((D - D.transpose()).cwiseAbs().maxCoeff() < 1e-13 * D.cwiseAbs().maxCoeff());
  CHECK(Eigen::SelfAdjointEigenSolver<DenseMatrix>(D).eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("interval chains") {
  const IntervalMeshPtr c = make_interval_mesh(0.0, 1.0, 2);
  const IntervalMeshPtr f = red_refine_interval(red_refine_interval(c));
  const auto chain = interval_chain(c, f);
  REQUIRE(chain.size() == 3);
  CHECK(chain.front() == c);
  CHECK(chain.back() == f);
  CHECK_THROWS(interval_chain(f, c));
}

TEST_CASE("fractional oracle eigenpairs match a dense generalized solve") {
  for (bool zero_ends : {true, false}) {
    const FractionalNormOracle o(make_interval_mesh(0.0, std::numbers::pi, 12), zero_ends);
    const DenseMatrix K = DenseMatrix(o.stiffness());
    const DenseMatrix M = DenseMatrix(o.mass());
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> ref(K, M);
    Vector lam = o.eigenvalues();
    std::sort(lam.data(), lam.data() + lam.size());
    CHECK((lam - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-11 * ref.eigenvalues().maxCoeff());
    const DenseMatrix& psi = o.eigenvectors();
    CHECK((psi.transpose() * M * psi - DenseMatrix::Identity(psi.cols(), psi.cols())).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("fractional norms: dual norm is the dual of the norm") {
  const FractionalNormOracle o(make_interval_mesh(0.0, 1.0, 10), false);
  const DenseMatrix M = DenseMatrix(o.mass());
  const DenseMatrix K = DenseMatrix(o.stiffness());
  // |v|^2 = v.T v with T = M psi diag(w) psi^T M, the dual Gram is T^{-1}
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vector f(M.rows());
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = d(rng);
  const DenseMatrix Dg = o.dual_gram();
  CHECK(std::sqrt(f.dot(Dg * f)) == doctest::Approx(o.dual_norm(f)).epsilon(1e-12));
  // sup_v f.v / |v| attained at v = Dg f
  const Vector v = Dg * f;
  CHECK(f.dot(v) / o.norm(v) == doctest::Approx(o.dual_norm(f)).epsilon(1e-10));
  // H^{1/2} norm lies between L2 and H1 norms on the unit interval
  const double l2 = std::sqrt(v.dot(M * v)), h1 = std::sqrt(v.dot((K + M) * v));
  CHECK(o.norm(v) >= l2 * (1 - 1e-12));
  CHECK(o.norm(v) <= h1 * (1 + 1e-12));
}

TEST_CASE("uniform detection and perturbation scaling") {
  CHECK(is_uniform(*make_interval_mesh(0.0, 2.0, 7)));
  CHECK(!is_uniform(IntervalMesh({0.0, 0.5, 2.0})));
  const Vector raw = Vector::LinSpaced(5, 1.0, 2.0);
  const auto norm = [](const Vector& v) { return v.norm(); };
  CHECK(normalize_perturbation(raw, 0.1, norm).norm() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS(normalize_perturbation(Vector::Zero(5), 0.1, norm));
}

TEST_CASE("block diagonal operator") {
  const DenseMatrix two = 2.0 * DenseMatrix::Identity(3, 3);
  const LinearOperator op = block_diagonal({identity_operator(2), make_operator(two, true)});
  CHECK(op.rows == 5);
  const Vector y = op * Vector::Ones(5);
  CHECK(y[1] == 1.0);
  CHECK(y[4] == 2.0);
}
