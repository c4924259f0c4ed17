#pragma once

#include "lsfem/assembly.hpp"
#include "lsfem/linalg.hpp"
#include "lsfem/spaces.hpp"

namespace lsfem {

/// Symmetric multiplicative V-cycle for a nested family of P1 spaces: one
/// forward Gauss-Seidel sweep going down, dense Cholesky on the coarsest
/// level, one backward sweep going up.
class MultilevelH1 {
 public:
  /// `spaces` ordered coarse to fine; each level's matrix is assembled directly.
  explicit MultilevelH1(std::vector<FeSpace> spaces, FormKind kind = FormKind::H1Gram);

  void apply(const Vector& r, Vector& x) const;
  LinearOperator op() const;

  std::size_t levels() const { return spaces_.size(); }
  const FeSpace& space(std::size_t l) const { return spaces_[l]; }
  const SparseMatrix& matrix(std::size_t l) const { return A_[l]; }
  /// Prolongation from level l to level l + 1.
  const SparseMatrix& prolongation(std::size_t l) const { return P_[l]; }
  /// Nonzeros touched by the last apply.
  std::size_t last_cost() const { return cost_; }

 private:
  std::vector<FeSpace> spaces_;
  std::vector<SparseMatrix> A_;
  std::vector<SparseMatrix> P_;
  Eigen::LLT<DenseMatrix> coarse_;
  mutable std::size_t cost_ = 0;

  void vcycle(std::size_t l, const Vector& r, Vector& x) const;
};

/// Builds the hierarchy of `finest` back to level 0 with the same constraint tags.
std::vector<FeSpace> p1_hierarchy(const FeSpace& finest);

/// Inverse of the multilevel Haar norm sum_l h_l |(Q_l - Q_{l-1}) v|^2 on
/// nested interval P0 spaces: G = sum_l (1/h_l - 1/h_{l+1}) P_l D_l^{-1} P_l^T
/// with 1/h_{L+1} = 0.
class MultilevelHminusHalf {
 public:
  /// Meshes ordered coarse to fine, each a refinement of the previous one.
  explicit MultilevelHminusHalf(std::vector<IntervalMeshPtr> meshes);

  void apply(const Vector& r, Vector& x) const;
  LinearOperator op() const;
  std::size_t levels() const { return meshes_.size(); }
  std::size_t last_cost() const { return cost_; }

 private:
  std::vector<IntervalMeshPtr> meshes_;
  std::vector<SparseMatrix> P_;  // level l -> l + 1
  std::vector<double> weight_;
  mutable std::size_t cost_ = 0;
};

/// The red-refinement chain from `coarse` to `fine` (inclusive).
std::vector<IntervalMeshPtr> interval_chain(const IntervalMeshPtr& coarse, const IntervalMeshPtr& fine);

/// Fractional norms through the (K, M) eigenpencil of boundary P1 on a
/// carrier mesh. With zero ends, |v|^2 = sum lambda_i^{1/2} c_i^2 and the dual
/// norm weights lambda_i^{-1/2}; without, the weights are (1 + lambda_i)^{+-1/2}.
class FractionalNormOracle {
 public:
  FractionalNormOracle(IntervalMeshPtr carrier, bool zero_ends);

  const FeSpace& space() const { return space_; }
  bool zero_ends() const { return zero_ends_; }
  const Vector& eigenvalues() const { return lambda_; }
  /// M-orthonormal eigenvectors as columns.
  const DenseMatrix& eigenvectors() const { return psi_; }
  const SparseMatrix& mass() const { return M_; }
  const SparseMatrix& stiffness() const { return K_; }

  /// Norm of a carrier P1 function in H^{1/2}.
  double norm(const Vector& coeffs) const;
  /// Dual norm of a functional given by its values on the carrier hats.
  double dual_norm(const Vector& functional) const;
  /// Matrix of the dual inner product on carrier functionals.
  DenseMatrix dual_gram() const;

  /// int phi_j q_e for carrier hats phi_j and P0 basis q_e; the P0 mesh must
  /// be nested in the carrier.
  SparseMatrix pairing(const FeSpace& p0) const;
  /// Dual-norm Gram matrix of a P0 space.
  DenseMatrix p0_gram(const FeSpace& p0) const;
  double p0_dual_norm(const FeSpace& p0, const Vector& coeffs) const;

 private:
  IntervalMeshPtr carrier_;
  bool zero_ends_;
  FeSpace space_;
  SparseMatrix K_, M_;
  Vector lambda_;
  DenseMatrix psi_;

  Vector dual_weights() const;
};

/// Uniform red refinement in 1D is detected and diagonalised with sines or cosines.
bool is_uniform(const IntervalMesh& mesh, double rel_tol = 1e-12);

/// Rescales p_raw so that norm(p) = tau; throws on p_raw with zero norm.
Vector normalize_perturbation(const Vector& p_raw, double tau, const std::function<double(const Vector&)>& norm);

/// 1D P1 stiffness and mass on an interval space.
SparseMatrix interval_stiffness(const FeSpace& s);
SparseMatrix interval_mass(const FeSpace& s);

/// Block-diagonal operator.
LinearOperator block_diagonal(std::vector<LinearOperator> blocks);

}  // namespace lsfem
