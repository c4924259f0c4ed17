#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "lsfem/mesh.hpp"
#include "lsfem/spaces.hpp"

using namespace lsfem;

namespace {

const std::array<BoundaryTag, 4> kAllLateral{BoundaryTag::LateralBoundary, BoundaryTag::LateralBoundary,
                                             BoundaryTag::LateralBoundary, BoundaryTag::LateralBoundary};

}  // namespace

TEST_CASE("initial meshes are conforming and NVB compatible") {
  for (const MeshPtr& m : {make_cauchy_initial(), make_square_initial(Box{}, kAllLateral),
                           make_spacetime_initial(Box{0, 1, 0, 1})}) {
    CHECK(m->is_conforming());
    CHECK(m->is_nvb_compatible());
  }
  const MeshPtr c = make_cauchy_initial();
  CHECK(c->num_vertices() == 11);
  CHECK(c->num_triangles() == 12);
  CHECK(c->total_area() == doctest::Approx(std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("uniform refinement keeps parent vertices and conformity") {
  MeshPtr m = make_cauchy_initial();
  const double area = m->total_area();
  const double angle0 = m->min_angle();
  for (int l = 1; l <= 6; ++l) {
    const MeshPtr f = uniform_nvb_refine(m);
    CHECK(f->level() == l);
    CHECK(f->num_triangles() == 2 * m->num_triangles());
    CHECK(f->is_conforming());
    CHECK(f->is_nvb_compatible());
    CHECK(f->total_area() == doctest::Approx(area).epsilon(1e-13));
    // shape regularity: NVB produces finitely many similarity classes
    CHECK(f->min_angle() >= 0.5 * angle0);
    for (std::size_t v = 0; v < m->num_vertices(); ++v) {
      CHECK(f->vertices()[v].x == m->vertices()[v].x);
      CHECK(f->vertices()[v].y == m->vertices()[v].y);
    }
    const auto& np = f->new_vertex_parents();
    for (std::size_t k = 0; k < np.size(); ++k) {
      const Point& p = f->vertices()[m->num_vertices() + k];
      const Point& a = m->vertices()[static_cast<std::size_t>(np[k][0])];
      const Point& b = m->vertices()[static_cast<std::size_t>(np[k][1])];
      CHECK(p.x == doctest::Approx(0.5 * (a.x + b.x)));
      CHECK(p.y == doctest::Approx(0.5 * (a.y + b.y)));
    }
    for (std::size_t t = 0; t < f->num_triangles(); ++t) {
      const Index parent = f->parent_triangle()[t];
      CHECK(f->area(static_cast<Index>(t)) == doctest::Approx(0.5 * m->area(parent)).epsilon(1e-13));
    }
    m = f;
  }
}

TEST_CASE("second successor bisects every edge") {
  const MeshPtr m = make_square_initial(Box{}, kAllLateral);
  const MeshPtr s = second_successor(m);
  CHECK(s->level() == 2);
  CHECK(s->num_vertices() == m->num_vertices() + m->edges().size());
}

TEST_CASE("boundary tags are inherited and dof counts follow the constraints") {
  const MeshPtr m = make_cauchy_initial();
  // bottom interior vertices (pi/3, 0), (2pi/3, 0) and three centres are free
  CHECK(p1_space(m, {BoundaryTag::SigmaComplement}).size() == 5);
  CHECK(p1_space(make_square_initial(Box{}, kAllLateral), {BoundaryTag::LateralBoundary}).size() == 1);
  const MeshPtr f = refine_times(m, 3);
  double sigma = 0.0;
  for (const auto& e : f->boundary_edges()) {
    if (e.tag != BoundaryTag::Sigma) continue;
    const Point& a = f->vertices()[static_cast<std::size_t>(e.v[0])];
    const Point& b = f->vertices()[static_cast<std::size_t>(e.v[1])];
    CHECK(a.y == 0.0);
    CHECK(b.y == 0.0);
    sigma += std::abs(b.x - a.x);
  }
  CHECK(sigma == doctest::Approx(std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("boundary trace mesh follows Sigma") {
  const MeshPtr f = refine_times(make_cauchy_initial(), 4);
  const IntervalMeshPtr tr = boundary_trace_mesh(*f, BoundaryTag::Sigma);
  CHECK(tr->length() == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(tr->source_vertices().size() == tr->breakpoints().size());
  for (std::size_t i = 0; i < tr->breakpoints().size(); ++i) {
    CHECK(f->vertices()[static_cast<std::size_t>(tr->source_vertices()[i])].x ==
          doctest::Approx(tr->breakpoints()[i]));
  }
}

TEST_CASE("interval meshes") {
  const IntervalMeshPtr m = make_interval_mesh(0.0, 2.0, 4);
  CHECK(m->num_elements() == 4);
  CHECK(m->max_length() == doctest::Approx(0.5));
  const IntervalMeshPtr r = red_refine_interval(m);
  CHECK(r->num_elements() == 8);
  CHECK(r->parent() == m);
  CHECK(r->locate(0.25) == 1);
  CHECK(r->locate(-1.0) == 0);
  CHECK(r->locate(5.0) == 7);
  CHECK_THROWS_AS(IntervalMesh({0.0, 1.0, 1.0}), MeshError);
}

TEST_CASE("malformed meshes are rejected") {
  CHECK_THROWS_AS(Mesh2D({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 5}}, {}), MeshError);
  CHECK_THROWS_AS(Mesh2D({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 1}}, {}), MeshError);
}

TEST_CASE("mesh dump lists every triangle") {
  const MeshPtr m = make_cauchy_initial();
  std::ostringstream os;
  write_mesh(os, *m);
  CHECK(os.str().find("triangles 12") != std::string::npos);
}
