#pragma once

#include <set>
#include <variant>

#include "lsfem/linalg.hpp"
#include "lsfem/mesh.hpp"

namespace lsfem {

enum class SpaceKind { P1Continuous, P0Discontinuous };

class SpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// P1 on a triangulation or an interval mesh, or P0 on an interval mesh or a
/// triangulation. Constrained vertices carry no dof.
class FeSpace {
 public:
  FeSpace() = default;

  SpaceKind kind() const { return kind_; }
  bool on_interval() const { return interval_ != nullptr; }
  const MeshPtr& mesh() const { return mesh_; }
  const IntervalMeshPtr& interval() const { return interval_; }
  std::size_t size() const { return entity_of_dof_.size(); }

  /// Dof of vertex (P1) or element (P0); -1 when constrained.
  Index dof(Index entity) const { return dof_of_entity_[entity]; }
  Index entity(Index dof) const { return entity_of_dof_[dof]; }
  const std::vector<Index>& dof_map() const { return dof_of_entity_; }
  const std::set<BoundaryTag>& constraint_tags() const { return tags_; }

  /// Full vertex/element vector with zeros at constrained entries.
  Vector expand(const Vector& coeffs) const;
  /// Restriction of a full vertex/element vector to the dofs.
  Vector restrict_values(const Vector& full) const;

  /// Value at barycentric coordinates `lam` of triangle t (2D spaces only).
  double evaluate(const Vector& coeffs, Index t, const std::array<double, 3>& lam) const;
  /// Gradient on triangle t (P1 on 2D meshes only).
  Point gradient(const Vector& coeffs, Index t) const;

  friend FeSpace p1_space(MeshPtr mesh, const std::set<BoundaryTag>& constraint_tags);
  friend FeSpace p1_space(IntervalMeshPtr mesh, bool constrain_ends);
  friend FeSpace p0_space(IntervalMeshPtr mesh);
  friend FeSpace p0_space(MeshPtr mesh);

 private:
  SpaceKind kind_ = SpaceKind::P1Continuous;
  MeshPtr mesh_;
  IntervalMeshPtr interval_;
  std::set<BoundaryTag> tags_;
  bool constrain_ends_ = false;
  std::vector<Index> dof_of_entity_;
  std::vector<Index> entity_of_dof_;

  void number(const std::vector<char>& constrained);
};

/// Vertices on closed edges carrying one of the tags are constrained.
FeSpace p1_space(MeshPtr mesh, const std::set<BoundaryTag>& constraint_tags = {});
FeSpace p1_space(IntervalMeshPtr mesh, bool constrain_ends = false);
FeSpace p0_space(IntervalMeshPtr mesh);
FeSpace p0_space(MeshPtr mesh);

/// Matrix mapping coarse coefficients to the coefficients of the same function
/// in the fine space. Works across several refinement levels.
SparseMatrix prolongation(const FeSpace& coarse, const FeSpace& fine);

/// Gradients of the barycentric coordinates of a triangle.
std::array<Point, 3> barycentric_gradients(const std::array<Point, 3>& corners);
/// Barycentric coordinates of p with respect to a triangle.
std::array<double, 3> barycentric(const std::array<Point, 3>& corners, const Point& p);

class ProductSpace {
 public:
  ProductSpace() = default;
  explicit ProductSpace(std::vector<FeSpace> factors);

  const std::vector<FeSpace>& factors() const { return factors_; }
  const FeSpace& factor(std::size_t k) const { return factors_[k]; }
  std::size_t size() const { return offsets_.back(); }
  std::size_t offset(std::size_t k) const { return offsets_[k]; }
  Vector block(const Vector& x, std::size_t k) const;
  void set_block(Vector& x, std::size_t k, const Vector& xk) const;

 private:
  std::vector<FeSpace> factors_;
  std::vector<std::size_t> offsets_{0};
};

/// Discontinuous piecewise linears in time tensored with a constrained 1D
/// spatial P1 space. Dof (e, a, j): time element e, local time basis a in
/// {0 = left node, 1 = right node}, spatial dof j.
struct TensorTestSpaceHeat {
  IntervalMeshPtr time;
  FeSpace spatial;

  std::size_t size() const { return 2 * time->num_elements() * spatial.size(); }
  std::size_t index(std::size_t e, int a, std::size_t j) const {
    return (2 * e + static_cast<std::size_t>(a)) * spatial.size() + j;
  }
};

TensorTestSpaceHeat tensor_test_space_heat(IntervalMeshPtr time_mesh, const FeSpace& spatial_fine);

}  // namespace lsfem
