#pragma once

#include <string>
#include <vector>

#include "lsfem/assembly.hpp"
#include "lsfem/linalg.hpp"
#include "lsfem/spaces.hpp"

namespace lsfem {

class InfSupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InfSupReport {
  std::string name;
  std::vector<int> levels;
  std::vector<double> rho;
  int truth_levels_extra = 2;
  /// Measured |Q| per level; empty when no Fortin operator was built.
  std::vector<double> fortin_norm;
  /// max |B_truth^T - B_test^T Q| per level, alongside fortin_norm.
  std::vector<double> orthogonality;
  std::vector<std::size_t> trial_dofs;
  /// Local bubble constant of the spatial refinement (heat tensor check only).
  double bubble_constant = -1.0;
  /// Set when the bubble constant vanishes and the floor cannot be expected.
  bool flagged = false;
};

/// B^T Gram^{-1} B for a test x trial matrix B.
DenseMatrix dual_schur(const SparseMatrix& B, const SparseMatrix& gram);
DenseMatrix dual_schur(const SparseMatrix& B, const DenseMatrix& gram);

/// sqrt of the smallest eigenvalue of the pencil (S_test, S_truth) on the
/// complement of the eigenvectors of S_truth below kernel_tol * lambda_max.
double estimate_infsup(const DenseMatrix& S_test, const DenseMatrix& S_truth, double kernel_tol = 1e-10);
double estimate_infsup(const SparseMatrix& B_test, const SparseMatrix& gram_test, const SparseMatrix& B_truth,
                       const SparseMatrix& gram_truth, double kernel_tol = 1e-10);

/// Fortin operator truth -> Y for P1 trial X, Y on the second successor of
/// the X mesh and a finer P1 truth space with the same constraint tags:
/// Scott-Zhang onto Y with one P1 edge dual per vertex, plus one correction
/// per X edge not contained in the constrained boundary that restores the
/// edge mean. Rows are Y dofs, columns truth dofs.
SparseMatrix build_fortin_poisson(const FeSpace& X, const FeSpace& Y, const FeSpace& truth);

/// Largest value of |Qv|_test / |v|_truth.
double fortin_norm(const SparseMatrix& Q, const SparseMatrix& gram_test, const SparseMatrix& gram_truth);
double fortin_norm(const DenseMatrix& Q, const DenseMatrix& gram_test, const DenseMatrix& gram_truth);

/// max |B_truth^T - B_test^T Q| over all entries.
double fortin_orthogonality(const SparseMatrix& B_test, const SparseMatrix& B_truth, const SparseMatrix& Q);
double fortin_orthogonality(const SparseMatrix& B_test, const SparseMatrix& B_truth, const DenseMatrix& Q);

/// Piecewise constants psi on `fine` (a red refinement of `coarse`), one per
/// coarse P1 hat, supported on the elements next to the vertex and
/// biorthogonal to the hats with unit diagonal. Rows are fine elements.
DenseMatrix build_dual_basis_trace(const IntervalMeshPtr& coarse, const IntervalMeshPtr& fine);

/// int phi_j q_e: rows are P0 elements of `p0_mesh`, columns P1 hats of `p1_mesh`.
SparseMatrix hat_p0_pairing(const IntervalMesh& p1_mesh, const IntervalMesh& p0_mesh);

/// inf over P1(T) of sup over interior P1 bubbles of the refined reference
/// triangle, L2 norms on both sides; 0 with fewer than three bubbles.
double element_bubble_infsup(int depth);
/// Same on the unit interval after `depth` red refinements; 0 with fewer than two bubbles.
double interval_bubble_infsup(int depth);

/// Cauchy block B1 (stiffness, Y on the second successor), truth two levels
/// beyond Y by default; with `fortin` the Fortin norm and orthogonality too.
InfSupReport cauchy_infsup_sweep(const std::vector<int>& levels, int truth_extra = 2, bool fortin = true);
/// Wave form with all boundary constrained in the test space.
InfSupReport wave_infsup_sweep(const std::vector<int>& levels, int truth_extra = 2, bool fortin = true);
/// Trace pairing: P1 on 3 * 2^k elements of (0, pi) against P0 on its red
/// refinement, dual H^{1/2} norms from a fractional-norm oracle.
InfSupReport trace_infsup_sweep(const std::vector<int>& levels, int truth_extra = 2, bool fortin = true);
/// Space-time heat form on 2^l x 2^l uniform tensor meshes of (0, 1)^2.
/// Test: DG linear in time times spatial P1 `spatial_depth` red refinements
/// finer in H^1_0; truth refines both by `truth_extra`.
InfSupReport verify_heat_tensor_infsup(const std::vector<int>& levels, int spatial_depth = 2, int truth_extra = 2);

/// |(Id - Q)'g| in the truth dual norm for the Cauchy Y1 data at `level`.
double cauchy_data_oscillation(int level, int truth_extra = 2);

}  // namespace lsfem
