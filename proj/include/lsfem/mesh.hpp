#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsfem {

using Index = std::int32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Boundary portion labels. Children of a bisected boundary edge inherit the tag.
enum class BoundaryTag : std::uint8_t {
  Sigma,
  SigmaComplement,
  LateralBoundary,
  InitialTime,
  FinalTime,
  Other,
};

std::string to_string(BoundaryTag tag);

struct BoundaryEdge {
  std::array<Index, 2> v{};
  BoundaryTag tag = BoundaryTag::Other;
  std::string label;  // only meaningful for BoundaryTag::Other
};

/// Triangle (a, b, c): the refinement edge is (a, b), c is the newest vertex.
using Triangle = std::array<Index, 3>;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Mesh2D;
using MeshPtr = std::shared_ptr<const Mesh2D>;

/// Immutable conforming triangulation. A refined mesh keeps every vertex of
/// its parent at the same index and appends the new midpoints.
class Mesh2D {
 public:
  Mesh2D(std::vector<Point> vertices, std::vector<Triangle> triangles,
         std::vector<BoundaryEdge> boundary_edges);

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  int level() const { return level_; }
  const MeshPtr& parent() const { return parent_; }
  /// Index of the parent triangle (in parent()) for each triangle; empty at level 0.
  std::span<const Index> parent_triangle() const { return parent_triangle_; }
  /// For vertex i >= parent()->num_vertices(): endpoints of the bisected parent edge.
  const std::vector<std::array<Index, 2>>& new_vertex_parents() const { return new_vertex_parents_; }

  /// Ancestor triangle index `levels_up` levels above this mesh.
  Index ancestor(Index t, int levels_up) const;
  /// The mesh `levels_up` levels above this one.
  const Mesh2D& ancestor_mesh(int levels_up) const;

  std::array<Point, 3> corners(Index t) const;
  double area(Index t) const;
  double diameter(Index t) const;
  double max_diameter() const;
  double min_diameter() const;
  double min_angle() const;
  double total_area() const;

  /// Unique undirected edges (sorted vertex pairs) in a deterministic order.
  std::vector<std::array<Index, 2>> edges() const;
  /// Edge-hash conformity test: each edge bounds one or two triangles and the
  /// single-triangle edges coincide with the tagged boundary edges.
  bool is_conforming() const;
  /// Every interior edge that is the refinement edge of one neighbour is the
  /// refinement edge of the other as well.
  bool is_nvb_compatible() const;

  std::vector<Index> vertices_with_tag(BoundaryTag tag) const;

 private:
  friend MeshPtr uniform_nvb_refine(const MeshPtr& mesh);

  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  int level_ = 0;
  MeshPtr parent_;
  std::vector<Index> parent_triangle_;
  std::vector<std::array<Index, 2>> new_vertex_parents_;
};

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Box {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  double area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(const Point& p, double tol = 1e-12) const {
    return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
  }
};

/// Omega = (0, pi) x (0, 1) split into three rectangles cut along both
/// diagonals; the rectangle centres are the newest vertices. Bottom edges are
/// Sigma, all other boundary edges SigmaComplement.
MeshPtr make_cauchy_initial();

/// Rectangle cut along both diagonals, centre is newest vertex of all four
/// triangles. Side tags are given in the order bottom, right, top, left.
MeshPtr make_square_initial(const Box& domain, const std::array<BoundaryTag, 4>& side_tags);

/// Space-time cylinder (t, x) in `domain` with t along the first coordinate:
/// t = t0 InitialTime, t = t1 FinalTime, x = x0 and x = x1 LateralBoundary.
MeshPtr make_spacetime_initial(const Box& domain);

/// One uniform newest-vertex bisection (with conformity closure).
MeshPtr uniform_nvb_refine(const MeshPtr& mesh);
/// Two uniform bisections; every edge of the input gets a midpoint vertex.
MeshPtr second_successor(const MeshPtr& mesh);
/// Refines `levels` times.
MeshPtr refine_times(MeshPtr mesh, int levels);
/// meshes[0] = initial, meshes[k] = k-fold refinement.
std::vector<MeshPtr> make_hierarchy(MeshPtr initial, int finest_level);

class IntervalMesh;
using IntervalMeshPtr = std::shared_ptr<const IntervalMesh>;

/// Partition of an interval by strictly increasing breakpoints.
class IntervalMesh {
 public:
  explicit IntervalMesh(std::vector<double> breakpoints, int level = 0, IntervalMeshPtr parent = nullptr,
                        std::vector<Index> source_vertices = {});

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  std::size_t num_elements() const { return breakpoints_.size() - 1; }
  double element_length(std::size_t e) const { return breakpoints_[e + 1] - breakpoints_[e]; }
  double max_length() const;
  double length() const { return breakpoints_.back() - breakpoints_.front(); }
  int level() const { return level_; }
  const IntervalMeshPtr& parent() const { return parent_; }
  /// Mesh vertex of each breakpoint when built from a 2D boundary; may be empty.
  const std::vector<Index>& source_vertices() const { return source_vertices_; }
  /// Element containing parameter s (clamped; ties go to the right element).
  std::size_t locate(double s) const;

 private:
  std::vector<double> breakpoints_;
  int level_;
  IntervalMeshPtr parent_;
  std::vector<Index> source_vertices_;
};

IntervalMeshPtr make_interval_mesh(double a, double b, std::size_t elements);
IntervalMeshPtr red_refine_interval(const IntervalMeshPtr& mesh);

/// Arc-length parameterised chain of the edges tagged `tag`, starting at the
/// lexicographically smallest endpoint.
IntervalMeshPtr boundary_trace_mesh(const Mesh2D& mesh, BoundaryTag tag);

/// Plain-text dump: vertices, triangles (newest vertex last), tagged boundary edges.
void write_mesh(std::ostream& os, const Mesh2D& mesh);

}  // namespace lsfem
