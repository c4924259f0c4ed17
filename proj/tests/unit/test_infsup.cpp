#include <doctest.h>

#include <numbers>
#include <random>

#include "lsfem/infsup.hpp"
#include "lsfem/precond.hpp"

using namespace lsfem;

TEST_CASE("test space equal to truth gives rho = 1") {
  const MeshPtr m = refine_times(make_cauchy_initial(), 2);
  const FeSpace X = p1_space(m);
  const FeSpace Y = p1_space(second_successor(m), {BoundaryTag::SigmaComplement});
  const SparseMatrix B = assemble({FormKind::H1Stiffness}, X, Y);
  const SparseMatrix G = assemble({FormKind::H1Gram}, Y, Y);
  CHECK(estimate_infsup(B, G, B, G) == doctest::Approx(1.0).epsilon(1e-10));
  const InfSupReport r = cauchy_infsup_sweep({1}, 0);
  CHECK(r.rho[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("dense and sparse dual Schur complements agree") {
  const MeshPtr m = refine_times(make_cauchy_initial(), 1);
  const FeSpace X = p1_space(m);
  const FeSpace Y = p1_space(second_successor(m), {BoundaryTag::SigmaComplement});
  const SparseMatrix B = assemble({FormKind::H1Stiffness}, X, Y);
  const SparseMatrix G = assemble({FormKind::H1Gram}, Y, Y);
  const DenseMatrix a = dual_schur(B, G);
  const DenseMatrix b = dual_schur(B, DenseMatrix(G));
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("kernel directions of the truth operator are ignored") {
  DenseMatrix S = DenseMatrix::Zero(2, 2);
  S(0, 0) = 1.0;
  DenseMatrix T = S;
  T(0, 0) = 4.0;
  CHECK(estimate_infsup(S, T) == doctest::Approx(0.5));
  CHECK_THROWS_AS(estimate_infsup(S, DenseMatrix::Zero(2, 2)), InfSupError);
}

TEST_CASE("rho decreases with the truth depth") {
  double prev = 2.0;
  for (int extra = 0; extra <= 2; ++extra) {
    const double r = cauchy_infsup_sweep({1}, extra, false).rho[0];
    CHECK(r <= prev + 1e-12);
    prev = r;
  }
  prev = 2.0;
  for (int extra = 0; extra <= 2; ++extra) {
    const double r = trace_infsup_sweep({1}, extra, false).rho[0];
    CHECK(r <= prev + 1e-12);
    prev = r;
  }
}

TEST_CASE("Fortin operators bound rho from below and are B-orthogonal") {
  for (const InfSupReport& r : {cauchy_infsup_sweep({1, 2}), wave_infsup_sweep({2, 3}), trace_infsup_sweep({0, 1, 2})}) {
    REQUIRE(r.fortin_norm.size() == r.levels.size());
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
      CHECK(r.rho[i] >= 1.0 / r.fortin_norm[i] - 1e-6);
      CHECK(r.orthogonality[i] < 1e-11);
    }
  }
}

TEST_CASE("Fortin operator reproduces test functions and edge means") {
  const MeshPtr m = refine_times(make_cauchy_initial(), 1);
  const MeshPtr y = second_successor(m);
  const MeshPtr t = second_successor(y);
  const FeSpace X = p1_space(m);
  const FeSpace Y = p1_space(y, {BoundaryTag::SigmaComplement});
  const FeSpace T = p1_space(t, {BoundaryTag::SigmaComplement});
  const SparseMatrix Q = build_fortin_poisson(X, Y, T);
  CHECK(Q.rows() == static_cast<Eigen::Index>(Y.size()));
  CHECK(Q.cols() == static_cast<Eigen::Index>(T.size()));
  const SparseMatrix B_test = assemble({FormKind::H1Stiffness}, X, Y);
  const SparseMatrix B_truth = assemble({FormKind::H1Stiffness}, X, T);
  CHECK(fortin_orthogonality(B_test, B_truth, Q) < 1e-12);
  const SparseMatrix G_y = assemble({FormKind::H1Gram}, Y, Y);
  const SparseMatrix G_t = assemble({FormKind::H1Gram}, T, T);
  const double n = fortin_norm(Q, G_y, G_t);
  CHECK(n >= 1.0 - 1e-12);
  CHECK(fortin_norm(DenseMatrix(Q), DenseMatrix(G_y), DenseMatrix(G_t)) == doctest::Approx(n).epsilon(1e-10));
}

TEST_CASE("trace dual basis is biorthogonal to the hats") {
  for (std::size_t n : {1u, 3u, 12u}) {
    const IntervalMeshPtr c = make_interval_mesh(0.0, std::numbers::pi, n);
    const IntervalMeshPtr f = red_refine_interval(c);
    const DenseMatrix Psi = build_dual_basis_trace(c, f);
    const SparseMatrix P = hat_p0_pairing(*c, *f);
    const DenseMatrix D = Psi.transpose() * DenseMatrix(P);
    CHECK((D - DenseMatrix::Identity(D.rows(), D.cols())).cwiseAbs().maxCoeff() < 1e-13);
    // supported inside the coarse hat
    for (Eigen::Index v = 0; v < Psi.cols(); ++v) {
      const double x = c->breakpoints()[static_cast<std::size_t>(v)];
      for (Eigen::Index e = 0; e < Psi.rows(); ++e) {
        const double mid = 0.5 * (f->breakpoints()[static_cast<std::size_t>(e)] + f->breakpoints()[static_cast<std::size_t>(e) + 1]);
        if (Psi(e, v) != 0.0) CHECK(std::abs(mid - x) < c->max_length());
      }
    }
  }
}

TEST_CASE("single-element trace: the hat and dual pair is positive") {
  const IntervalMeshPtr c = make_interval_mesh(0.0, 1.0, 1);
  const IntervalMeshPtr f = red_refine_interval(c);
  const DenseMatrix Psi = build_dual_basis_trace(c, f);
  const DenseMatrix D = Psi.transpose() * DenseMatrix(hat_p0_pairing(*c, *f));
  CHECK(D.diagonal().minCoeff() > 0.0);
}

TEST_CASE("dual basis needs a red refinement") {
  const IntervalMeshPtr c = make_interval_mesh(0.0, 1.0, 3);
  CHECK_THROWS(build_dual_basis_trace(c, make_interval_mesh(0.0, 1.0, 5)));
}

TEST_CASE("local bubble constants") {
  // NVB depth 2 has no interior vertex, depth 3 only one
  CHECK(element_bubble_infsup(1) == 0.0);
  CHECK(element_bubble_infsup(2) == 0.0);
  CHECK(element_bubble_infsup(3) == 0.0);
  double prev = 0.0;
  for (int d = 4; d <= 7; ++d) {
    const double b = element_bubble_infsup(d);
    CHECK(b > 0.0);
    CHECK(b >= prev - 1e-12);
    CHECK(b <= 1.0 + 1e-12);
    prev = b;
  }
  CHECK(interval_bubble_infsup(1) == 0.0);
  CHECK(interval_bubble_infsup(2) == doctest::Approx(0.75).epsilon(1e-12));
  prev = 0.0;
  for (int d = 2; d <= 6; ++d) {
    CHECK(interval_bubble_infsup(d) >= prev);
    prev = interval_bubble_infsup(d);
  }
}

TEST_CASE("heat tensor check: identity and flagged depth") {
  CHECK(verify_heat_tensor_infsup({1}, 2, 0).rho[0] == doctest::Approx(1.0).epsilon(1e-10));
  const InfSupReport bad = verify_heat_tensor_infsup({1, 2}, 1);
  CHECK(bad.flagged);
  CHECK(bad.bubble_constant == 0.0);
  const InfSupReport good = verify_heat_tensor_infsup({1, 2, 3});
  CHECK(!good.flagged);
  CHECK(good.bubble_constant > 0.0);
  for (double r : good.rho) CHECK(r > 0.5);
}

TEST_CASE("data oscillation decreases") {
  CHECK(cauchy_data_oscillation(3) < cauchy_data_oscillation(1));
}
