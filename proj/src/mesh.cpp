#include "lsfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <unordered_map>

namespace lsfem {

namespace {

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

double dist(const Point& p, const Point& q) { return std::hypot(p.x - q.x, p.y - q.y); }

double angle_at(const Point& p, const Point& q, const Point& r) {
  const double ax = q.x - p.x, ay = q.y - p.y, bx = r.x - p.x, by = r.y - p.y;
  return std::atan2(std::abs(ax * by - ay * bx), ax * bx + ay * by);
}

// Unique edges of a triangle list with a lookup from key to edge id.
struct EdgeTable {
  std::vector<std::array<Index, 2>> edges;
  std::unordered_map<std::uint64_t, Index> id;
  std::vector<int> count;

  explicit EdgeTable(const std::vector<Triangle>& tris) {
    id.reserve(tris.size() * 2);
    for (const auto& t : tris) {
      for (int k = 0; k < 3; ++k) {
        const Index a = t[k], b = t[(k + 1) % 3];
        auto [it, inserted] = id.try_emplace(edge_key(a, b), static_cast<Index>(edges.size()));
        if (inserted) {
          edges.push_back({std::min(a, b), std::max(a, b)});
          count.push_back(0);
        }
        ++count[it->second];
      }
    }
  }
  Index operator()(Index a, Index b) const { return id.at(edge_key(a, b)); }
};

}  // namespace

std::string to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Sigma: return "Sigma";
    case BoundaryTag::SigmaComplement: return "SigmaComplement";
    case BoundaryTag::LateralBoundary: return "LateralBoundary";
    case BoundaryTag::InitialTime: return "InitialTime";
    case BoundaryTag::FinalTime: return "FinalTime";
    case BoundaryTag::Other: return "Other";
  }
  return "Other";
}

Mesh2D::Mesh2D(std::vector<Point> vertices, std::vector<Triangle> triangles,
               std::vector<BoundaryEdge> boundary_edges)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)) {
  const auto nv = static_cast<Index>(vertices_.size());
  for (const auto& t : triangles_) {
    for (Index v : t) {
      if (v < 0 || v >= nv) throw MeshError("triangle references a missing vertex");
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) throw MeshError("degenerate triangle");
  }
}

Index Mesh2D::ancestor(Index t, int levels_up) const {
  const Mesh2D* m = this;
  for (int k = 0; k < levels_up; ++k) {
    if (!m->parent_) throw MeshError("ancestor requested above the initial mesh");
    t = m->parent_triangle_[t];
    m = m->parent_.get();
  }
  return t;
}

const Mesh2D& Mesh2D::ancestor_mesh(int levels_up) const {
  const Mesh2D* m = this;
  for (int k = 0; k < levels_up; ++k) {
    if (!m->parent_) throw MeshError("ancestor requested above the initial mesh");
    m = m->parent_.get();
  }
  return *m;
}

std::array<Point, 3> Mesh2D::corners(Index t) const {
  const auto& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double Mesh2D::area(Index t) const {
  const auto [a, b, c] = corners(t);
  return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

double Mesh2D::diameter(Index t) const {
  const auto [a, b, c] = corners(t);
  return std::max({dist(a, b), dist(b, c), dist(c, a)});
}

double Mesh2D::max_diameter() const {
  double h = 0.0;
  for (Index t = 0; t < static_cast<Index>(triangles_.size()); ++t) h = std::max(h, diameter(t));
  return h;
}

double Mesh2D::min_diameter() const {
  double h = std::numeric_limits<double>::infinity();
  for (Index t = 0; t < static_cast<Index>(triangles_.size()); ++t) h = std::min(h, diameter(t));
  return h;
}

double Mesh2D::min_angle() const {
  double m = std::numbers::pi;
  for (Index t = 0; t < static_cast<Index>(triangles_.size()); ++t) {
    const auto [a, b, c] = corners(t);
    m = std::min({m, angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
  }
  return m;
}

double Mesh2D::total_area() const {
  double s = 0.0;
  for (Index t = 0; t < static_cast<Index>(triangles_.size()); ++t) s += area(t);
  return s;
}

std::vector<std::array<Index, 2>> Mesh2D::edges() const { return EdgeTable(triangles_).edges; }

bool Mesh2D::is_conforming() const {
  const EdgeTable table(triangles_);
  std::unordered_map<std::uint64_t, int> boundary;
  for (const auto& e : boundary_edges_) {
    if (!boundary.try_emplace(edge_key(e.v[0], e.v[1]), 0).second) return false;
  }
  std::size_t single = 0;
  for (std::size_t k = 0; k < table.edges.size(); ++k) {
    const int c = table.count[k];
    if (c > 2) return false;
    if (c == 1) {
      ++single;
      if (!boundary.contains(edge_key(table.edges[k][0], table.edges[k][1]))) return false;
    }
  }
  return single == boundary_edges_.size();
}

bool Mesh2D::is_nvb_compatible() const {
  const EdgeTable table(triangles_);
  std::vector<int> as_refinement_edge(table.edges.size(), 0);
  for (const auto& t : triangles_) ++as_refinement_edge[table(t[0], t[1])];
  for (std::size_t k = 0; k < table.edges.size(); ++k) {
    if (table.count[k] == 2 && as_refinement_edge[k] == 1) return false;
  }
  return true;
}

std::vector<Index> Mesh2D::vertices_with_tag(BoundaryTag tag) const {
  std::vector<char> mark(vertices_.size(), 0);
  for (const auto& e : boundary_edges_) {
    if (e.tag == tag) mark[e.v[0]] = mark[e.v[1]] = 1;
  }
  std::vector<Index> out;
  for (Index v = 0; v < static_cast<Index>(mark.size()); ++v) {
    if (mark[v]) out.push_back(v);
  }
  return out;
}

MeshPtr make_cauchy_initial() {
  const double w = std::numbers::pi / 3.0;
  std::vector<Point> v;
  for (int k = 0; k <= 3; ++k) v.push_back({k * w, 0.0});
  for (int k = 0; k <= 3; ++k) v.push_back({k * w, 1.0});
  for (int k = 0; k < 3; ++k) v.push_back({(k + 0.5) * w, 0.5});

  std::vector<Triangle> tris;
  std::vector<BoundaryEdge> bnd;
  for (Index k = 0; k < 3; ++k) {
    const Index bl = k, br = k + 1, tr = 4 + k + 1, tl = 4 + k, c = 8 + k;
    tris.push_back({bl, br, c});
    tris.push_back({br, tr, c});
    tris.push_back({tr, tl, c});
    tris.push_back({tl, bl, c});
    bnd.push_back({{bl, br}, BoundaryTag::Sigma, {}});
    bnd.push_back({{tr, tl}, BoundaryTag::SigmaComplement, {}});
  }
  bnd.push_back({{3, 7}, BoundaryTag::SigmaComplement, {}});
  bnd.push_back({{4, 0}, BoundaryTag::SigmaComplement, {}});
  return std::make_shared<const Mesh2D>(std::move(v), std::move(tris), std::move(bnd));
}

MeshPtr make_square_initial(const Box& d, const std::array<BoundaryTag, 4>& side_tags) {
  if (!(d.x1 > d.x0) || !(d.y1 > d.y0)) throw MeshError("degenerate rectangle");
  std::vector<Point> v = {{d.x0, d.y0}, {d.x1, d.y0}, {d.x1, d.y1}, {d.x0, d.y1},
                          {0.5 * (d.x0 + d.x1), 0.5 * (d.y0 + d.y1)}};
  std::vector<Triangle> tris = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
  std::vector<BoundaryEdge> bnd;
  for (Index k = 0; k < 4; ++k) bnd.push_back({{k, static_cast<Index>((k + 1) % 4)}, side_tags[k], {}});
  return std::make_shared<const Mesh2D>(std::move(v), std::move(tris), std::move(bnd));
}

MeshPtr make_spacetime_initial(const Box& domain) {
  return make_square_initial(domain, {BoundaryTag::LateralBoundary, BoundaryTag::FinalTime,
                                      BoundaryTag::LateralBoundary, BoundaryTag::InitialTime});
}

MeshPtr uniform_nvb_refine(const MeshPtr& mesh) {
  const auto& tris = mesh->triangles_;
  const EdgeTable table(tris);
  const std::size_t ne = table.edges.size();

  std::vector<char> marked(ne, 0);
  for (const auto& t : tris) marked[table(t[0], t[1])] = 1;

  // Closure: a triangle with any marked edge must have its refinement edge marked.
  constexpr int kMaxClosureSweeps = 1000;
  bool changed = true;
  int sweeps = 0;
  while (changed) {
    if (++sweeps > kMaxClosureSweeps) throw MeshError("NVB closure did not terminate; inconsistent labels");
    changed = false;
    for (const auto& t : tris) {
      const Index e0 = table(t[0], t[1]);
      if (!marked[e0] && (marked[table(t[1], t[2])] || marked[table(t[2], t[0])])) {
        marked[e0] = 1;
        changed = true;
      }
    }
  }

  std::vector<Point> verts = mesh->vertices_;
  std::vector<std::array<Index, 2>> new_parents;
  std::vector<Index> midpoint(ne, -1);
  for (std::size_t k = 0; k < ne; ++k) {
    if (!marked[k]) continue;
    const auto [a, b] = table.edges[k];
    midpoint[k] = static_cast<Index>(verts.size());
    verts.push_back({0.5 * (verts[a].x + verts[b].x), 0.5 * (verts[a].y + verts[b].y)});
    new_parents.push_back({a, b});
  }

  std::vector<Triangle> out;
  std::vector<Index> parent_of;
  out.reserve(2 * tris.size());
  parent_of.reserve(2 * tris.size());
  for (Index p = 0; p < static_cast<Index>(tris.size()); ++p) {
    const auto [a, b, c] = tris[p];
    const Index m0 = midpoint[table(a, b)];
    const Index m1 = midpoint[table(b, c)];
    const Index m2 = midpoint[table(c, a)];
    auto emit = [&](Triangle t) {
      out.push_back(t);
      parent_of.push_back(p);
    };
    if (m2 >= 0) {
      emit({m0, c, m2});
      emit({a, m0, m2});
    } else {
      emit({c, a, m0});
    }
    if (m1 >= 0) {
      emit({m0, b, m1});
      emit({c, m0, m1});
    } else {
      emit({b, c, m0});
    }
  }

  std::vector<BoundaryEdge> bnd;
  for (const auto& e : mesh->boundary_edges_) {
    const Index m = midpoint[table(e.v[0], e.v[1])];
    if (m < 0) {
      bnd.push_back(e);
    } else {
      bnd.push_back({{e.v[0], m}, e.tag, e.label});
      bnd.push_back({{m, e.v[1]}, e.tag, e.label});
    }
  }

  auto fine = std::make_shared<Mesh2D>(std::move(verts), std::move(out), std::move(bnd));
  fine->level_ = mesh->level_ + 1;
  fine->parent_ = mesh;
  fine->parent_triangle_ = std::move(parent_of);
  fine->new_vertex_parents_ = std::move(new_parents);
  return fine;
}

MeshPtr second_successor(const MeshPtr& mesh) { return uniform_nvb_refine(uniform_nvb_refine(mesh)); }

MeshPtr refine_times(MeshPtr mesh, int levels) {
  for (int k = 0; k < levels; ++k) mesh = uniform_nvb_refine(mesh);
  return mesh;
}

std::vector<MeshPtr> make_hierarchy(MeshPtr initial, int finest_level) {
  if (!initial->is_nvb_compatible()) throw MeshError("initial newest-vertex labels are not compatible");
  std::vector<MeshPtr> out{std::move(initial)};
  for (int k = 0; k < finest_level; ++k) out.push_back(uniform_nvb_refine(out.back()));
  return out;
}

IntervalMesh::IntervalMesh(std::vector<double> breakpoints, int level, IntervalMeshPtr parent,
                           std::vector<Index> source_vertices)
    : breakpoints_(std::move(breakpoints)),
      level_(level),
      parent_(std::move(parent)),
      source_vertices_(std::move(source_vertices)) {
  if (breakpoints_.size() < 2) throw MeshError("interval mesh needs at least one element");
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] > breakpoints_[k - 1])) throw MeshError("breakpoints must increase strictly");
  }
  if (!source_vertices_.empty() && source_vertices_.size() != breakpoints_.size()) {
    throw MeshError("source vertex list does not match breakpoints");
  }
}

double IntervalMesh::max_length() const {
  double h = 0.0;
  for (std::size_t e = 0; e < num_elements(); ++e) h = std::max(h, element_length(e));
  return h;
}

std::size_t IntervalMesh::locate(double s) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
  if (it == breakpoints_.begin()) return 0;
  const auto e = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return std::min(e, num_elements() - 1);
}

IntervalMeshPtr make_interval_mesh(double a, double b, std::size_t elements) {
  if (elements == 0 || !(b > a)) throw MeshError("invalid interval mesh request");
  std::vector<double> bp(elements + 1);
  for (std::size_t k = 0; k <= elements; ++k) bp[k] = a + (b - a) * static_cast<double>(k) / elements;
  bp.back() = b;
  return std::make_shared<const IntervalMesh>(std::move(bp));
}

IntervalMeshPtr red_refine_interval(const IntervalMeshPtr& mesh) {
  const auto& bp = mesh->breakpoints();
  std::vector<double> out;
  out.reserve(2 * bp.size() - 1);
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    out.push_back(bp[k]);
    out.push_back(0.5 * (bp[k] + bp[k + 1]));
  }
  out.push_back(bp.back());
  return std::make_shared<const IntervalMesh>(std::move(out), mesh->level() + 1, mesh);
}

IntervalMeshPtr boundary_trace_mesh(const Mesh2D& mesh, BoundaryTag tag) {
  std::map<Index, std::vector<Index>> adj;
  for (const auto& e : mesh.boundary_edges()) {
    if (e.tag != tag) continue;
    adj[e.v[0]].push_back(e.v[1]);
    adj[e.v[1]].push_back(e.v[0]);
  }
  if (adj.empty()) throw MeshError("no boundary edges carry tag " + to_string(tag));

  const auto& P = mesh.vertices();
  auto lex_less = [&](Index a, Index b) {
    return P[a].x < P[b].x || (P[a].x == P[b].x && P[a].y < P[b].y);
  };
  Index start = -1;
  std::size_t endpoints = 0;
  for (const auto& [v, nb] : adj) {
    if (nb.size() > 2) throw MeshError("tagged boundary is branched");
    if (nb.size() == 1) {
      ++endpoints;
      if (start < 0 || lex_less(v, start)) start = v;
    }
  }
  if (endpoints != 2) throw MeshError("tagged boundary is not a single open chain");

  std::vector<Index> chain{start};
  std::vector<double> s{0.0};
  Index prev = -1, cur = start;
  while (true) {
    const auto& nb = adj[cur];
    Index next = -1;
    for (Index w : nb) {
      if (w != prev) next = w;
    }
    if (next < 0 || (nb.size() == 1 && prev >= 0)) break;
    s.push_back(s.back() + dist(P[cur], P[next]));
    chain.push_back(next);
    prev = cur;
    cur = next;
  }
  if (chain.size() != adj.size()) throw MeshError("tagged boundary is disconnected");
  return std::make_shared<const IntervalMesh>(std::move(s), mesh.level(), nullptr, std::move(chain));
}

void write_mesh(std::ostream& os, const Mesh2D& mesh) {
  os.precision(17);
  os << "vertices " << mesh.num_vertices() << '\n';
  for (const auto& p : mesh.vertices()) os << p.x << ' ' << p.y << '\n';
  os << "triangles " << mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles()) os << t[0] << ' ' << t[1] << ' ' << t[2] << " newest " << t[2] << '\n';
  os << "boundary_edges " << mesh.boundary_edges().size() << '\n';
  for (const auto& e : mesh.boundary_edges()) {
    os << e.v[0] << ' ' << e.v[1] << ' ' << to_string(e.tag);
    if (!e.label.empty()) os << ' ' << e.label;
    os << '\n';
  }
}

}  // namespace lsfem
