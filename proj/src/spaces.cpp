#include "lsfem/spaces.hpp"

#include <algorithm>
#include <cmath>

namespace lsfem {

void FeSpace::number(const std::vector<char>& constrained) {
  dof_of_entity_.assign(constrained.size(), -1);
  entity_of_dof_.clear();
  for (Index e = 0; e < static_cast<Index>(constrained.size()); ++e) {
    if (constrained[e]) continue;
    dof_of_entity_[e] = static_cast<Index>(entity_of_dof_.size());
    entity_of_dof_.push_back(e);
  }
}

FeSpace p1_space(MeshPtr mesh, const std::set<BoundaryTag>& constraint_tags) {
  FeSpace s;
  s.kind_ = SpaceKind::P1Continuous;
  s.tags_ = constraint_tags;
  std::vector<char> constrained(mesh->num_vertices(), 0);
  for (const auto& e : mesh->boundary_edges()) {
    if (constraint_tags.contains(e.tag)) constrained[e.v[0]] = constrained[e.v[1]] = 1;
  }
  s.mesh_ = std::move(mesh);
  s.number(constrained);
  return s;
}

FeSpace p1_space(IntervalMeshPtr mesh, bool constrain_ends) {
  FeSpace s;
  s.kind_ = SpaceKind::P1Continuous;
  s.constrain_ends_ = constrain_ends;
  std::vector<char> constrained(mesh->breakpoints().size(), 0);
  if (constrain_ends && !constrained.empty()) constrained.front() = constrained.back() = 1;
  s.interval_ = std::move(mesh);
  s.number(constrained);
  if (s.size() == 0) throw SpaceError("P1 interval space without free vertices");
  return s;
}

FeSpace p0_space(IntervalMeshPtr mesh) {
  if (!mesh || mesh->num_elements() == 0) throw SpaceError("P0 space on an empty mesh");
  FeSpace s;
  s.kind_ = SpaceKind::P0Discontinuous;
  s.interval_ = std::move(mesh);
  s.number(std::vector<char>(s.interval_->num_elements(), 0));
  return s;
}

FeSpace p0_space(MeshPtr mesh) {
  if (!mesh || mesh->num_triangles() == 0) throw SpaceError("P0 space on an empty mesh");
  FeSpace s;
  s.kind_ = SpaceKind::P0Discontinuous;
  s.mesh_ = std::move(mesh);
  s.number(std::vector<char>(s.mesh_->num_triangles(), 0));
  return s;
}

Vector FeSpace::expand(const Vector& coeffs) const {
  Vector full = Vector::Zero(static_cast<Eigen::Index>(dof_of_entity_.size()));
  for (std::size_t d = 0; d < entity_of_dof_.size(); ++d) full[entity_of_dof_[d]] = coeffs[d];
  return full;
}

Vector FeSpace::restrict_values(const Vector& full) const {
  Vector c(static_cast<Eigen::Index>(size()));
  for (std::size_t d = 0; d < entity_of_dof_.size(); ++d) c[d] = full[entity_of_dof_[d]];
  return c;
}

double FeSpace::evaluate(const Vector& coeffs, Index t, const std::array<double, 3>& lam) const {
  if (!mesh_) throw SpaceError("evaluate needs a 2D space");
  if (kind_ == SpaceKind::P0Discontinuous) return coeffs[dof_of_entity_[t]];
  const auto& tri = mesh_->triangles()[t];
  double v = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Index d = dof_of_entity_[tri[k]];
    if (d >= 0) v += lam[k] * coeffs[d];
  }
  return v;
}

Point FeSpace::gradient(const Vector& coeffs, Index t) const {
  if (!mesh_ || kind_ != SpaceKind::P1Continuous) throw SpaceError("gradient needs a 2D P1 space");
  const auto g = barycentric_gradients(mesh_->corners(t));
  const auto& tri = mesh_->triangles()[t];
  Point out;
  for (int k = 0; k < 3; ++k) {
    const Index d = dof_of_entity_[tri[k]];
    if (d < 0) continue;
    out.x += g[k].x * coeffs[d];
    out.y += g[k].y * coeffs[d];
  }
  return out;
}

std::array<Point, 3> barycentric_gradients(const std::array<Point, 3>& c) {
  const double det = (c[1].x - c[0].x) * (c[2].y - c[0].y) - (c[1].y - c[0].y) * (c[2].x - c[0].x);
  std::array<Point, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Point& p = c[(k + 1) % 3];
    const Point& q = c[(k + 2) % 3];
    g[k] = {(p.y - q.y) / det, (q.x - p.x) / det};
  }
  return g;
}

std::array<double, 3> barycentric(const std::array<Point, 3>& c, const Point& p) {
  const double det = (c[1].x - c[0].x) * (c[2].y - c[0].y) - (c[1].y - c[0].y) * (c[2].x - c[0].x);
  const double l1 = ((p.x - c[0].x) * (c[2].y - c[0].y) - (p.y - c[0].y) * (c[2].x - c[0].x)) / det;
  const double l2 = ((c[1].x - c[0].x) * (p.y - c[0].y) - (c[1].y - c[0].y) * (p.x - c[0].x)) / det;
  return {1.0 - l1 - l2, l1, l2};
}

namespace {

// Vertex-value prolongation between successive 2D levels (unconstrained).
SparseMatrix vertex_prolongation_step(const Mesh2D& fine) {
  const auto nc = static_cast<Index>(fine.parent()->num_vertices());
  const auto nf = static_cast<Index>(fine.num_vertices());
  Triplets t;
  t.reserve(nc + 2 * (nf - nc));
  for (Index v = 0; v < nc; ++v) t.emplace_back(v, v, 1.0);
  const auto& np = fine.new_vertex_parents();
  for (Index v = nc; v < nf; ++v) {
    t.emplace_back(v, np[v - nc][0], 0.5);
    t.emplace_back(v, np[v - nc][1], 0.5);
  }
  return make_sparse(nf, nc, t);
}

SparseMatrix p1_2d_prolongation(const FeSpace& coarse, const FeSpace& fine) {
  const Mesh2D* m = fine.mesh().get();
  SparseMatrix P;
  bool first = true;
  while (m != coarse.mesh().get()) {
    if (!m->parent()) throw SpaceError("fine mesh does not refine the coarse mesh");
    SparseMatrix step = vertex_prolongation_step(*m);
    if (first) {
      P = step;
      first = false;
    } else {
      P = SparseMatrix(P * step);
    }
    m = m->parent().get();
  }
  if (first) {
    Triplets t;
    for (Index v = 0; v < static_cast<Index>(m->num_vertices()); ++v) t.emplace_back(v, v, 1.0);
    P = make_sparse(static_cast<Index>(m->num_vertices()), static_cast<Index>(m->num_vertices()), t);
  }
  Triplets t;
  for (Index r = 0; r < P.outerSize(); ++r) {
    const Index fd = fine.dof(r);
    for (SparseMatrix::InnerIterator it(P, r); it; ++it) {
      const Index cd = coarse.dof(static_cast<Index>(it.col()));
      if (cd < 0) continue;
      if (fd < 0) {
        if (std::abs(it.value()) > 0.0) throw SpaceError("coarse dof lands on a constrained fine vertex");
        continue;
      }
      t.emplace_back(fd, cd, it.value());
    }
  }
  return make_sparse(static_cast<Index>(fine.size()), static_cast<Index>(coarse.size()), t);
}

double interval_hat(const std::vector<double>& bp, std::size_t node, double s) {
  if (node > 0 && s >= bp[node - 1] && s <= bp[node]) return (s - bp[node - 1]) / (bp[node] - bp[node - 1]);
  if (node + 1 < bp.size() && s >= bp[node] && s <= bp[node + 1]) return (bp[node + 1] - s) / (bp[node + 1] - bp[node]);
  return 0.0;
}

void check_nested(const IntervalMesh& coarse, const IntervalMesh& fine) {
  const auto& cb = coarse.breakpoints();
  const auto& fb = fine.breakpoints();
  const double tol = 1e-12 * std::max(1.0, coarse.length());
  for (double s : cb) {
    auto it = std::lower_bound(fb.begin(), fb.end(), s - tol);
    if (it == fb.end() || std::abs(*it - s) > tol) throw SpaceError("interval meshes are not nested");
  }
}

}  // namespace

SparseMatrix prolongation(const FeSpace& coarse, const FeSpace& fine) {
  if (coarse.kind() != fine.kind() || coarse.on_interval() != fine.on_interval()) {
    throw SpaceError("prolongation between spaces of different kinds");
  }
  if (!coarse.on_interval()) {
    if (coarse.kind() == SpaceKind::P1Continuous) return p1_2d_prolongation(coarse, fine);
    Triplets t;
    const int up = fine.mesh()->level() - coarse.mesh()->level();
    if (up < 0) throw SpaceError("fine mesh is coarser than coarse mesh");
    if (&fine.mesh()->ancestor_mesh(up) != coarse.mesh().get()) throw SpaceError("meshes are not in one hierarchy");
    for (Index tf = 0; tf < static_cast<Index>(fine.mesh()->num_triangles()); ++tf) {
      t.emplace_back(tf, fine.mesh()->ancestor(tf, up), 1.0);
    }
    return make_sparse(static_cast<Index>(fine.size()), static_cast<Index>(coarse.size()), t);
  }

  const auto& cm = *coarse.interval();
  const auto& fm = *fine.interval();
  check_nested(cm, fm);
  Triplets t;
  if (coarse.kind() == SpaceKind::P0Discontinuous) {
    for (std::size_t e = 0; e < fm.num_elements(); ++e) {
      const double mid = 0.5 * (fm.breakpoints()[e] + fm.breakpoints()[e + 1]);
      t.emplace_back(static_cast<int>(e), static_cast<int>(cm.locate(mid)), 1.0);
    }
  } else {
    const auto& cb = cm.breakpoints();
    for (std::size_t v = 0; v < fm.breakpoints().size(); ++v) {
      const Index fd = fine.dof(static_cast<Index>(v));
      const double s = fm.breakpoints()[v];
      const std::size_t e = cm.locate(s);
      for (std::size_t node : {e, e + 1}) {
        const double w = interval_hat(cb, node, s);
        const Index cd = coarse.dof(static_cast<Index>(node));
        if (w == 0.0 || cd < 0) continue;
        if (fd < 0) throw SpaceError("coarse dof lands on a constrained fine vertex");
        t.emplace_back(fd, cd, w);
      }
    }
  }
  return make_sparse(static_cast<Index>(fine.size()), static_cast<Index>(coarse.size()), t);
}

ProductSpace::ProductSpace(std::vector<FeSpace> factors) : factors_(std::move(factors)) {
  for (const auto& f : factors_) offsets_.push_back(offsets_.back() + f.size());
}

Vector ProductSpace::block(const Vector& x, std::size_t k) const {
  return x.segment(static_cast<Eigen::Index>(offsets_[k]), static_cast<Eigen::Index>(factors_[k].size()));
}

void ProductSpace::set_block(Vector& x, std::size_t k, const Vector& xk) const {
  x.segment(static_cast<Eigen::Index>(offsets_[k]), static_cast<Eigen::Index>(factors_[k].size())) = xk;
}

TensorTestSpaceHeat tensor_test_space_heat(IntervalMeshPtr time_mesh, const FeSpace& spatial_fine) {
  if (!spatial_fine.on_interval() || spatial_fine.kind() != SpaceKind::P1Continuous) {
    throw SpaceError("heat tensor space needs a 1D spatial P1 space");
  }
  if (spatial_fine.size() == 0) throw SpaceError("spatial space has no interior vertices");
  return {std::move(time_mesh), spatial_fine};
}

}  // namespace lsfem
