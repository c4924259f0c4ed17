#include "lsfem/assembly.hpp"

#include <cmath>

namespace lsfem {

namespace {

double polygon_area(const std::vector<Point>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point& u = p[i];
    const Point& v = p[(i + 1) % p.size()];
    a += u.x * v.y - v.x * u.y;
  }
  return 0.5 * std::abs(a);
}

int levels_between(const FeSpace& trial, const FeSpace& test) {
  const int up = test.mesh()->level() - trial.mesh()->level();
  if (up < 0) throw AssemblyError("test mesh must equal or refine the trial mesh");
  if (&test.mesh()->ancestor_mesh(up) != trial.mesh().get()) {
    throw AssemblyError("trial and test meshes are not in one hierarchy");
  }
  return up;
}

struct LocalBasis {
  std::array<Index, 3> entity{};
  int count = 0;
  std::array<Point, 3> grad{};
};

LocalBasis local_basis(const FeSpace& s, Index t) {
  LocalBasis b;
  if (s.kind() == SpaceKind::P0Discontinuous) {
    b.entity[0] = t;
    b.count = 1;
    return b;
  }
  b.entity = s.mesh()->triangles()[t];
  b.count = 3;
  b.grad = barycentric_gradients(s.mesh()->corners(t));
  return b;
}

SparseMatrix trace_mass(BoundaryTag tag, const FeSpace& trial, const FeSpace& test) {
  if (trial.on_interval() || trial.kind() != SpaceKind::P1Continuous) {
    throw AssemblyError("trace pairing needs a 2D P1 trial space");
  }
  Triplets t;
  if (!test.on_interval()) {
    if (test.mesh() != trial.mesh() || test.kind() != SpaceKind::P1Continuous) {
      throw AssemblyError("boundary mass needs identical P1 spaces on one mesh");
    }
    const auto& P = trial.mesh()->vertices();
    for (const auto& e : trial.mesh()->boundary_edges()) {
      if (e.tag != tag) continue;
      const double L = std::hypot(P[e.v[0]].x - P[e.v[1]].x, P[e.v[0]].y - P[e.v[1]].y);
      const double diag = L * (2.0 / 6.0), off = L * (1.0 / 6.0);
      for (int i = 0; i < 2; ++i) {
        const Index di = test.dof(e.v[i]);
        if (di < 0) continue;
        for (int j = 0; j < 2; ++j) {
          const Index dj = trial.dof(e.v[j]);
          if (dj >= 0) t.emplace_back(di, dj, i == j ? diag : off);
        }
      }
    }
    return make_sparse(static_cast<Index>(test.size()), static_cast<Index>(trial.size()), t);
  }

  if (test.kind() != SpaceKind::P0Discontinuous) throw AssemblyError("trace pairing needs a P0 boundary test space");
  const auto trace = boundary_trace_mesh(*trial.mesh(), tag);
  const auto& cb = trace->breakpoints();
  const auto& src = trace->source_vertices();
  const auto& fb = test.interval()->breakpoints();
  const double tol = 1e-12 * std::max(1.0, trace->length());
  if (std::abs(fb.front() - cb.front()) > tol || std::abs(fb.back() - cb.back()) > tol) {
    throw AssemblyError("boundary test mesh does not cover the tagged boundary");
  }
  for (std::size_t e = 0; e < test.interval()->num_elements(); ++e) {
    const double a = fb[e], b = fb[e + 1];
    const std::size_t c = trace->locate(0.5 * (a + b));
    if (a < cb[c] - tol || b > cb[c + 1] + tol) throw AssemblyError("boundary test mesh is not nested in the trace mesh");
    const double h = cb[c + 1] - cb[c];
    const double right_a = (a - cb[c]) / h, right_b = (b - cb[c]) / h;
    const double len = b - a;
    const double w_left = len * (2.0 - right_a - right_b) * 0.5;
    const double w_right = len * (right_a + right_b) * 0.5;
    const Index dl = trial.dof(src[c]), dr = trial.dof(src[c + 1]);
    if (dl >= 0) t.emplace_back(static_cast<Index>(e), dl, w_left);
    if (dr >= 0) t.emplace_back(static_cast<Index>(e), dr, w_right);
  }
  return make_sparse(static_cast<Index>(test.size()), static_cast<Index>(trial.size()), t);
}

}  // namespace

std::vector<int> window_membership(const Mesh2D& mesh, const Box& window) {
  std::vector<int> in(mesh.num_triangles(), 0);
  const double tol = 1e-12 * std::max({1.0, std::abs(window.x1), std::abs(window.y1)});
  for (Index t = 0; t < static_cast<Index>(mesh.num_triangles()); ++t) {
    const auto c = mesh.corners(t);
    if (window.contains(c[0], tol) && window.contains(c[1], tol) && window.contains(c[2], tol)) {
      in[t] = 1;
      continue;
    }
    const double overlap = polygon_area(clip_to_box(c, window));
    if (overlap > 1e-10 * mesh.area(t)) throw AssemblyError("window boundary is not resolved by the mesh");
  }
  return in;
}

Eigen::Matrix3d local_stiffness(const std::array<Point, 3>& c) {
  const auto g = barycentric_gradients(c);
  const double area = 0.5 * std::abs((c[1].x - c[0].x) * (c[2].y - c[0].y) - (c[1].y - c[0].y) * (c[2].x - c[0].x));
  Eigen::Matrix3d K;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) K(i, j) = area * (g[i].x * g[j].x + g[i].y * g[j].y);
  }
  return K;
}

Eigen::Matrix3d local_mass(const std::array<Point, 3>& c) {
  const double area = 0.5 * std::abs((c[1].x - c[0].x) * (c[2].y - c[0].y) - (c[1].y - c[0].y) * (c[2].x - c[0].x));
  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) M(i, j) = area * (i == j ? 2.0 : 1.0) / 12.0;
  }
  return M;
}

SparseMatrix assemble(const Form& form, const FeSpace& trial, const FeSpace& test) {
  if (form.kind == FormKind::TraceMass) return trace_mass(form.tag, trial, test);
  if (form.kind == FormKind::FoslsFlux || form.kind == FormKind::FoslsDiv) {
    throw AssemblyError("first-order system forms need product spaces");
  }
  if (trial.on_interval() || test.on_interval()) throw AssemblyError("volume forms need 2D spaces");
  const bool needs_grad = form.kind != FormKind::L2Mass && form.kind != FormKind::WindowMass;
  if (needs_grad && (trial.kind() != SpaceKind::P1Continuous || test.kind() != SpaceKind::P1Continuous)) {
    throw AssemblyError("gradient forms need P1 spaces");
  }

  const int up = levels_between(trial, test);
  const Mesh2D& fine = *test.mesh();
  std::vector<int> inside;
  if (form.kind == FormKind::WindowMass) inside = window_membership(fine, form.window);

  const auto& rule = triangle_rule_deg2();
  const std::size_t nq = rule.points.size();
  Triplets trip;
  trip.reserve(fine.num_triangles() * 9);
  for (Index T = 0; T < static_cast<Index>(fine.num_triangles()); ++T) {
    if (!inside.empty() && !inside[T]) continue;
    const auto cf = fine.corners(T);
    const double area = fine.area(T);
    const Index Tc = up == 0 ? T : fine.ancestor(T, up);
    const LocalBasis vb = local_basis(test, T);
    const LocalBasis zb = local_basis(trial, Tc);

    // Basis values at the quadrature points.
    std::array<std::array<double, 3>, 6> vv{}, zv{};
    for (std::size_t q = 0; q < nq; ++q) {
      const auto& lam = rule.points[q];
      std::array<double, 3> lc = lam;
      if (up > 0 && trial.kind() == SpaceKind::P1Continuous) {
        lc = barycentric(trial.mesh()->corners(Tc), map_point(cf, lam));
      }
      for (int k = 0; k < 3; ++k) {
        vv[q][k] = test.kind() == SpaceKind::P1Continuous ? lam[k] : 1.0;
        zv[q][k] = trial.kind() == SpaceKind::P1Continuous ? lc[k] : 1.0;
      }
    }

    for (int i = 0; i < vb.count; ++i) {
      const Index di = test.dof(vb.entity[i]);
      if (di < 0) continue;
      for (int j = 0; j < zb.count; ++j) {
        const Index dj = trial.dof(zb.entity[j]);
        if (dj < 0) continue;
        const Point& gv = vb.grad[i];
        const Point& gz = zb.grad[j];
        double mass = 0.0;
        double val = 0.0;
        if (form.kind == FormKind::L2Mass || form.kind == FormKind::WindowMass || form.kind == FormKind::H1Gram) {
          for (std::size_t q = 0; q < nq; ++q) mass += rule.weights[q] * (vv[q][i] * zv[q][j]);
          mass *= area;
        }
        switch (form.kind) {
          case FormKind::L2Mass:
          case FormKind::WindowMass: val = mass; break;
          case FormKind::H1Stiffness: val = area * (gv.x * gz.x + gv.y * gz.y); break;
          case FormKind::H1Gram: val = mass + area * (gv.x * gz.x + gv.y * gz.y); break;
          case FormKind::WaveForm: val = area * (gv.y * gz.y - gv.x * gz.x); break;
          case FormKind::HeatForm: {
            double tv = 0.0;
            for (std::size_t q = 0; q < nq; ++q) tv += rule.weights[q] * vv[q][i];
            val = area * (gz.x * tv + gv.y * gz.y);
            break;
          }
          default: throw AssemblyError("unsupported form");
        }
        trip.emplace_back(di, dj, val);
      }
    }
  }
  return make_sparse(static_cast<Index>(test.size()), static_cast<Index>(trial.size()), trip);
}

SparseMatrix assemble(const Form& form, const ProductSpace& space) {
  if (space.factors().size() != 2) throw AssemblyError("product forms need two factors (u1, u2)");
  const FeSpace& s1 = space.factor(0);
  const FeSpace& s2 = space.factor(1);
  if (form.kind == FormKind::WindowMass || form.kind == FormKind::L2Mass) {
    return embed_block(assemble(form, s1, s1), space, 0, 0);
  }
  if (form.kind != FormKind::FoslsFlux && form.kind != FormKind::FoslsDiv) {
    throw AssemblyError("unsupported product form");
  }
  if (s1.mesh() != s2.mesh() || s1.kind() != SpaceKind::P1Continuous || s2.kind() != SpaceKind::P1Continuous) {
    throw AssemblyError("product factors must be P1 on one mesh");
  }
  const Mesh2D& mesh = *s1.mesh();
  const auto& rule = triangle_rule_deg2();
  const bool flux = form.kind == FormKind::FoslsFlux;
  const auto off2 = static_cast<Index>(space.offset(1));
  Triplets trip;
  trip.reserve(mesh.num_triangles() * 36);
  for (Index T = 0; T < static_cast<Index>(mesh.num_triangles()); ++T) {
    const auto& tri = mesh.triangles()[T];
    const auto g = barycentric_gradients(mesh.corners(T));
    const double area = mesh.area(T);
    std::array<Index, 6> dof{};
    for (int k = 0; k < 3; ++k) {
      const Index d1 = s1.dof(tri[k]);
      const Index d2 = s2.dof(tri[k]);
      dof[k] = d1;
      dof[k + 3] = d2 < 0 ? -1 : off2 + d2;
    }
    // Values of the flux or divergence of each basis function at the quadrature points.
    std::array<std::array<double, 3>, 6> val{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      for (int k = 0; k < 3; ++k) {
        val[k][q] = flux ? g[k].y : g[k].x;
        val[k + 3][q] = flux ? rule.points[q][k] : g[k].y;
      }
    }
    for (int i = 0; i < 6; ++i) {
      if (dof[i] < 0) continue;
      for (int j = 0; j < 6; ++j) {
        if (dof[j] < 0) continue;
        double s = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) s += rule.weights[q] * (val[i][q] * val[j][q]);
        trip.emplace_back(dof[i], dof[j], area * s);
      }
    }
  }
  const auto n = static_cast<Index>(space.size());
  return make_sparse(n, n, trip);
}

SparseMatrix embed_block(const SparseMatrix& A, const ProductSpace& space, std::size_t row, std::size_t col) {
  Triplets t;
  t.reserve(static_cast<std::size_t>(A.nonZeros()));
  const auto r0 = static_cast<Index>(space.offset(row));
  const auto c0 = static_cast<Index>(space.offset(col));
  for (Index r = 0; r < A.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) t.emplace_back(r0 + r, c0 + static_cast<Index>(it.col()), it.value());
  }
  const auto n = static_cast<Index>(space.size());
  return make_sparse(n, n, t);
}

Vector assemble_load(const Field& f, const FeSpace& test, const Box* window) {
  if (test.on_interval()) throw AssemblyError("volume load needs a 2D space");
  const Mesh2D& mesh = *test.mesh();
  std::vector<int> inside;
  if (window) inside = window_membership(mesh, *window);
  const auto& rule = triangle_rule_deg2();
  Vector b = Vector::Zero(static_cast<Eigen::Index>(test.size()));
  for (Index T = 0; T < static_cast<Index>(mesh.num_triangles()); ++T) {
    if (!inside.empty() && !inside[T]) continue;
    const auto c = mesh.corners(T);
    const double area = mesh.area(T);
    const LocalBasis vb = local_basis(test, T);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& lam = rule.points[q];
      const double fw = area * rule.weights[q] * f(map_point(c, lam));
      for (int i = 0; i < vb.count; ++i) {
        const Index d = test.dof(vb.entity[i]);
        if (d >= 0) b[d] += fw * (test.kind() == SpaceKind::P1Continuous ? lam[i] : 1.0);
      }
    }
  }
  return b;
}

Vector assemble_boundary_load(const Field& f, BoundaryTag tag, const FeSpace& test) {
  if (test.on_interval() || test.kind() != SpaceKind::P1Continuous) {
    throw AssemblyError("boundary load needs a 2D P1 space");
  }
  const auto gl = gauss_legendre(2);
  const auto& P = test.mesh()->vertices();
  Vector b = Vector::Zero(static_cast<Eigen::Index>(test.size()));
  for (const auto& e : test.mesh()->boundary_edges()) {
    if (e.tag != tag) continue;
    const Point& a = P[e.v[0]];
    const Point& c = P[e.v[1]];
    const double L = std::hypot(c.x - a.x, c.y - a.y);
    for (std::size_t q = 0; q < gl.points.size(); ++q) {
      const double s = gl.points[q];
      const double fw = L * gl.weights[q] * f({a.x + s * (c.x - a.x), a.y + s * (c.y - a.y)});
      const Index d0 = test.dof(e.v[0]), d1 = test.dof(e.v[1]);
      if (d0 >= 0) b[d0] += fw * (1.0 - s);
      if (d1 >= 0) b[d1] += fw * s;
    }
  }
  return b;
}

Vector assemble_interval_load(const std::function<double(double)>& f, const FeSpace& test) {
  if (!test.on_interval()) throw AssemblyError("interval load needs an interval space");
  const auto gl = gauss_legendre(2);
  const auto& bp = test.interval()->breakpoints();
  Vector b = Vector::Zero(static_cast<Eigen::Index>(test.size()));
  for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
    const double h = bp[e + 1] - bp[e];
    for (std::size_t q = 0; q < gl.points.size(); ++q) {
      const double s = gl.points[q];
      const double fw = h * gl.weights[q] * f(bp[e] + s * h);
      if (test.kind() == SpaceKind::P0Discontinuous) {
        b[static_cast<Eigen::Index>(e)] += fw;
      } else {
        const Index d0 = test.dof(static_cast<Index>(e)), d1 = test.dof(static_cast<Index>(e + 1));
        if (d0 >= 0) b[d0] += fw * (1.0 - s);
        if (d1 >= 0) b[d1] += fw * s;
      }
    }
  }
  return b;
}

Vector assemble_load(const Form& form, const Field& f, const ProductSpace& space) {
  Vector b = Vector::Zero(static_cast<Eigen::Index>(space.size()));
  const FeSpace& s1 = space.factor(0);
  if (form.kind == FormKind::WindowMass || form.kind == FormKind::L2Mass) {
    space.set_block(b, 0, assemble_load(f, s1, form.kind == FormKind::WindowMass ? &form.window : nullptr));
    return b;
  }
  if (form.kind != FormKind::FoslsDiv) throw AssemblyError("unsupported product load");
  const FeSpace& s2 = space.factor(1);
  const Mesh2D& mesh = *s1.mesh();
  const auto& rule = triangle_rule_deg2();
  const auto off2 = static_cast<Eigen::Index>(space.offset(1));
  for (Index T = 0; T < static_cast<Index>(mesh.num_triangles()); ++T) {
    const auto c = mesh.corners(T);
    const auto g = barycentric_gradients(c);
    const auto& tri = mesh.triangles()[T];
    double fint = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) fint += rule.weights[q] * f(map_point(c, rule.points[q]));
    fint *= mesh.area(T);
    for (int k = 0; k < 3; ++k) {
      const Index d1 = s1.dof(tri[k]), d2 = s2.dof(tri[k]);
      if (d1 >= 0) b[d1] += fint * g[k].x;
      if (d2 >= 0) b[off2 + d2] += fint * g[k].y;
    }
  }
  return b;
}

double integrate_square(const Field& f, const Mesh2D& mesh, const Box* window) {
  std::vector<int> inside;
  if (window) inside = window_membership(mesh, *window);
  const auto& rule = triangle_rule_deg2();
  double s = 0.0;
  for (Index T = 0; T < static_cast<Index>(mesh.num_triangles()); ++T) {
    if (!inside.empty() && !inside[T]) continue;
    const auto c = mesh.corners(T);
    double loc = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double v = f(map_point(c, rule.points[q]));
      loc += rule.weights[q] * v * v;
    }
    s += mesh.area(T) * loc;
  }
  return s;
}

}  // namespace lsfem
