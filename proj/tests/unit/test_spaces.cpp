#include <doctest.h>

#include "lsfem/spaces.hpp"

using namespace lsfem;

namespace {

double linear(const Point& p) { return 0.5 - p.x + 2.0 * p.y; }

Vector nodal(const FeSpace& V, double (*f)(const Point&)) {
  Vector v(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = f(V.mesh()->vertices()[static_cast<std::size_t>(V.entity(static_cast<Index>(i)))]);
  }
  return v;
}

}  // namespace

TEST_CASE("P1 prolongation reproduces linears over several levels") {
  const MeshPtr c = make_cauchy_initial();
  const MeshPtr f = refine_times(c, 3);
  const FeSpace Vc = p1_space(c);
  const FeSpace Vf = p1_space(f);
  const SparseMatrix P = prolongation(Vc, Vf);
  CHECK((P * nodal(Vc, linear) - nodal(Vf, linear)).cwiseAbs().maxCoeff() < 1e-14);
  // row sums are one
  CHECK((P * Vector::Ones(P.cols()) - Vector::Ones(P.rows())).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(prolongation(Vc, p0_space(f)), SpaceError);
}

TEST_CASE("constrained spaces: expand and restrict") {
  const MeshPtr m = refine_times(make_cauchy_initial(), 2);
  const FeSpace V = p1_space(m, {BoundaryTag::SigmaComplement});
  CHECK(V.size() < m->num_vertices());
  for (Index v : m->vertices_with_tag(BoundaryTag::SigmaComplement)) CHECK(V.dof(v) == -1);
  const Vector x = Vector::LinSpaced(static_cast<Eigen::Index>(V.size()), 1.0, 2.0);
  const Vector full = V.expand(x);
  CHECK(full.size() == static_cast<Eigen::Index>(m->num_vertices()));
  CHECK(V.restrict_values(full) == x);
}

TEST_CASE("evaluation and gradients of P1 functions") {
  const MeshPtr m = refine_times(make_cauchy_initial(), 1);
  const FeSpace V = p1_space(m);
  const Vector u = nodal(V, linear);
  for (Index t = 0; t < static_cast<Index>(m->num_triangles()); ++t) {
    const Point g = V.gradient(u, t);
    CHECK(g.x == doctest::Approx(-1.0));
    CHECK(g.y == doctest::Approx(2.0));
    const auto c = m->corners(t);
    const Point mid{(c[0].x + c[1].x + c[2].x) / 3.0, (c[0].y + c[1].y + c[2].y) / 3.0};
    CHECK(V.evaluate(u, t, {1.0 / 3, 1.0 / 3, 1.0 / 3}) == doctest::Approx(linear(mid)));
    const auto lam = barycentric(c, mid);
    CHECK(lam[0] == doctest::Approx(1.0 / 3));
  }
}

TEST_CASE("interval spaces") {
  const IntervalMeshPtr m = make_interval_mesh(0.0, 1.0, 4);
  CHECK(p1_space(m).size() == 5);
  CHECK(p1_space(m, true).size() == 3);
  CHECK(p0_space(m).size() == 4);
  const SparseMatrix P = prolongation(p1_space(m, true), p1_space(red_refine_interval(m), true));
  CHECK(P.rows() == 7);
  CHECK(P.cols() == 3);
  CHECK(P.coeff(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("product spaces and the heat tensor test space") {
  const MeshPtr m = refine_times(make_spacetime_initial(Box{}), 2);
  const ProductSpace X({p1_space(m, {BoundaryTag::LateralBoundary}), p1_space(m)});
  CHECK(X.size() == X.factor(0).size() + X.factor(1).size());
  Vector x = Vector::Zero(static_cast<Eigen::Index>(X.size()));
  X.set_block(x, 1, Vector::Ones(static_cast<Eigen::Index>(X.factor(1).size())));
  CHECK(X.block(x, 0).norm() == 0.0);
  CHECK(X.block(x, 1).sum() == doctest::Approx(static_cast<double>(X.factor(1).size())));

  const TensorTestSpaceHeat Y = tensor_test_space_heat(make_interval_mesh(0, 1, 3), p1_space(make_interval_mesh(0, 1, 8), true));
  CHECK(Y.size() == 2 * 3 * 7);
  CHECK(Y.index(2, 1, 6) == Y.size() - 1);
  CHECK_THROWS_AS(tensor_test_space_heat(make_interval_mesh(0, 1, 3), p1_space(m)), SpaceError);
}
