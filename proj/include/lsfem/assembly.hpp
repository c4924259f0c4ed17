#pragma once

#include <functional>

#include "lsfem/linalg.hpp"
#include "lsfem/quadrature.hpp"
#include "lsfem/spaces.hpp"

namespace lsfem {

enum class FormKind {
  H1Stiffness,  // int grad z . grad v
  L2Mass,       // int z v
  H1Gram,       // mass + stiffness
  WaveForm,     // int -z_t v_t + z_x v_x, with t the first coordinate
  HeatForm,     // int z_t v + z_x v_x
  TraceMass,    // int over tagged boundary of z v
  FoslsFlux,    // int (z2 + z1_x)(w2 + w1_x), product spaces only
  FoslsDiv,     // int (z1_t + z2_x)(w1_t + w2_x), product spaces only
  WindowMass,   // int over the window box of z v
};

struct Form {
  FormKind kind = FormKind::L2Mass;
  BoundaryTag tag = BoundaryTag::Other;
  Box window{};
};

class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Field = std::function<double(const Point&)>;

/// M(i, j) = form(trial_j, test_i). The test mesh may refine the trial mesh;
/// fine elements are visited and coarse basis functions evaluated there.
SparseMatrix assemble(const Form& form, const FeSpace& trial, const FeSpace& test);
/// Square forms on (u1, u2) product spaces of P1 factors on one mesh.
/// WindowMass acts on the first factor only.
SparseMatrix assemble(const Form& form, const ProductSpace& space);

/// Local matrices on a single triangle (P1 hats, vertex order).
Eigen::Matrix3d local_stiffness(const std::array<Point, 3>& corners);
Eigen::Matrix3d local_mass(const std::array<Point, 3>& corners);

/// int f v over the mesh (degree-2 rule), or over `window` when given.
Vector assemble_load(const Field& f, const FeSpace& test, const Box* window = nullptr);
/// int over the tagged boundary edges of f v (2-point Gauss per edge).
Vector assemble_boundary_load(const Field& f, BoundaryTag tag, const FeSpace& test);
/// int f(s) v(s) ds on an interval space (2-point Gauss per element).
Vector assemble_interval_load(const std::function<double(double)>& f, const FeSpace& test);
/// FOSLS loads on (u1, u2): FoslsDiv gives int f div w, WindowMass int_window f w1.
Vector assemble_load(const Form& form, const Field& f, const ProductSpace& space);

/// Degree-2 quadrature of f^2 over the mesh or the window; matches the load rule.
double integrate_square(const Field& f, const Mesh2D& mesh, const Box* window = nullptr);

/// Places A into the (row, col) block of a product-space matrix.
SparseMatrix embed_block(const SparseMatrix& A, const ProductSpace& space, std::size_t row, std::size_t col);

/// Classifies triangles against a box: +1 inside, 0 outside; throws when a
/// triangle straddles the box boundary.
std::vector<int> window_membership(const Mesh2D& mesh, const Box& window);

}  // namespace lsfem
