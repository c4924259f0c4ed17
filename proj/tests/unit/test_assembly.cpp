#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lsfem/assembly.hpp"
#include "lsfem/quadrature.hpp"

using namespace lsfem;

namespace {

const std::array<Point, 3> kRef{Point{0, 0}, Point{1, 0}, Point{0, 1}};

double max_rel(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) { return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff(); }

// int over the reference triangle of x^i y^j = i! j! / (i + j + 2)!
double monomial(int i, int j) { return std::tgamma(i + 1) * std::tgamma(j + 1) / std::tgamma(i + j + 3); }

}  // namespace

TEST_CASE("local matrices on the reference triangle") {
  Eigen::Matrix3d K;
  K << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  K *= 0.5;
  Eigen::Matrix3d M;
  M << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  M /= 24.0;
  CHECK(max_rel(local_stiffness(kRef), K) < 1e-13);
  CHECK(max_rel(local_mass(kRef), M) < 1e-13);
}

TEST_CASE("local matrices transform with the element") {
  // scale by s and rotate: stiffness invariant, mass scales with s^2
  const double s = 0.3, c = std::cos(0.7), n = std::sin(0.7);
  std::array<Point, 3> T;
  for (int k = 0; k < 3; ++k) T[k] = {2.0 + s * (c * kRef[k].x - n * kRef[k].y), -1.0 + s * (n * kRef[k].x + c * kRef[k].y)};
  CHECK(max_rel(local_stiffness(T), local_stiffness(kRef)) < 1e-13);
  CHECK(max_rel(local_mass(T), s * s * local_mass(kRef)) < 1e-13);
}

TEST_CASE("quadrature rules integrate monomials exactly") {
  const auto check = [](const TriangleRule& r, int degree) {
    for (int i = 0; i <= degree; ++i) {
      for (int j = 0; i + j <= degree; ++j) {
        double q = 0.0;
        for (std::size_t k = 0; k < r.points.size(); ++k) {
          const Point p = map_point(kRef, r.points[k]);
          q += 0.5 * r.weights[k] * std::pow(p.x, i) * std::pow(p.y, j);
        }
        CHECK(q == doctest::Approx(monomial(i, j)).epsilon(1e-14));
      }
    }
  };
  check(triangle_rule_deg2(), 2);
  check(triangle_rule_deg4(), 4);
  const LineRule g = gauss_legendre(2);
  double s = 0.0;
  for (std::size_t k = 0; k < g.points.size(); ++k) s += g.weights[k] * std::pow(g.points[k], 3);
  CHECK(s == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("box clipping preserves area") {
  const std::array<Point, 3> T{Point{0, 0}, Point{2, 0}, Point{0, 2}};
  const auto poly = clip_to_box(T, Box{0.5, 3.0, 0.0, 1.0});
  double a = 0.0;
  for (const auto& t : fan(poly)) a += 0.5 * std::abs((t[1].x - t[0].x) * (t[2].y - t[0].y) - (t[2].x - t[0].x) * (t[1].y - t[0].y));
  // {x >= 1/2, y <= 1, x + y <= 2}: int_0^1 (3/2 - y) dy
  CHECK(a == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(clip_to_box(T, Box{3, 4, 3, 4}).empty());
}

TEST_CASE("global matrices: constants, symmetry and areas") {
  const MeshPtr m = refine_times(make_cauchy_initial(), 3);
  const FeSpace V = p1_space(m);
  const SparseMatrix K = assemble({FormKind::H1Stiffness}, V, V);
  const SparseMatrix M = assemble({FormKind::L2Mass}, V, V);
  const Vector one = Vector::Ones(static_cast<Eigen::Index>(V.size()));
  CHECK((K * one).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(one.dot(M * one) == doctest::Approx(std::numbers::pi).epsilon(1e-13));
  CHECK(is_symmetric(K, 1e-14));
  CHECK(is_symmetric(M, 1e-14));
  const SparseMatrix S = assemble({FormKind::TraceMass, BoundaryTag::Sigma}, V, V);
  CHECK(one.dot(S * one) == doctest::Approx(std::numbers::pi).epsilon(1e-13));
  // grad x . grad x over Omega
  Vector x(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) x[static_cast<Eigen::Index>(i)] = m->vertices()[static_cast<std::size_t>(V.entity(static_cast<Index>(i)))].x;
  CHECK(x.dot(K * x) == doctest::Approx(std::numbers::pi).epsilon(1e-13));
}

TEST_CASE("rectangular assembly equals prolongated square assembly") {
  const MeshPtr c = refine_times(make_cauchy_initial(), 1);
  const MeshPtr f = second_successor(c);
  const FeSpace X = p1_space(c);
  const FeSpace Y = p1_space(f, {BoundaryTag::SigmaComplement});
  const SparseMatrix P = prolongation(X, p1_space(f));
  const FeSpace Yfull = p1_space(f);
  for (FormKind k : {FormKind::H1Stiffness, FormKind::L2Mass, FormKind::WaveForm, FormKind::HeatForm}) {
    const SparseMatrix B = assemble({k}, X, Y);
    const SparseMatrix A = assemble({k}, Yfull, Y);
    const SparseMatrix AP = A * P;
    CHECK(DenseMatrix(B - AP).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("loads integrate linears exactly") {
  const MeshPtr m = refine_times(make_cauchy_initial(), 2);
  const FeSpace V = p1_space(m);
  const Field f = [](const Point& p) { return 1.0 + 2.0 * p.x - p.y; };
  Vector fi(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) fi[static_cast<Eigen::Index>(i)] = f(m->vertices()[i]);
  const SparseMatrix M = assemble({FormKind::L2Mass}, V, V);
  CHECK((assemble_load(f, V) - M * fi).cwiseAbs().maxCoeff() < 1e-13);
  const SparseMatrix S = assemble({FormKind::TraceMass, BoundaryTag::Sigma}, V, V);
  CHECK((assemble_boundary_load(f, BoundaryTag::Sigma, V) - S * fi).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("window mass sees only the window") {
  const MeshPtr m = refine_times(make_spacetime_initial(Box{0, 1, 0, 1}), 4);
  const FeSpace V = p1_space(m);
  const Box w{0.0, 1.0, 0.25, 0.75};
  const SparseMatrix W = assemble({FormKind::WindowMass, BoundaryTag::Other, w}, V, V);
  const Vector one = Vector::Ones(static_cast<Eigen::Index>(V.size()));
  CHECK(one.dot(W * one) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(integrate_square([](const Point&) { return 2.0; }, *m, &w) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK_THROWS(window_membership(*m, Box{0.0, 1.0, 0.3, 0.7}));
}
