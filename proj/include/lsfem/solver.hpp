#pragma once

#include <memory>
#include <optional>

#include "lsfem/linalg.hpp"

namespace lsfem {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Residual component measured in a discrete dual norm: (g - Bz)(G (g - Bz)).
struct DualBlock {
  std::string name;
  SparseMatrix B;  // test x trial
  LinearOperator G;
  Vector g;
};

/// Residual component in a Hilbert norm, stored as the expanded quadratic
/// |Cz - h|^2 = z.Q z - 2 z.r + hh.
struct L2Block {
  std::string name;
  SparseMatrix Q;
  Vector r;
  double hh = 0.0;
};

/// eps^2 |Lz|_H^2 with H the Gram matrix of L.
struct Regularizer {
  SparseMatrix H;
  double eps = 0.0;
};

struct LsProblem {
  Eigen::Index n = 0;
  std::vector<DualBlock> dual_blocks;
  std::vector<L2Block> l2_blocks;
  std::optional<Regularizer> regularizer;
  /// Preconditioner for the normal equations; identity when unset.
  LinearOperator preconditioner;
  /// Keeps preconditioner state alive for the operators above.
  std::vector<std::shared_ptr<const void>> owners;

  LinearOperator spd_operator() const;
  Vector spd_rhs() const;
};

struct SolveReport {
  Vector u;
  std::vector<double> dual_parts;
  std::vector<double> l2_parts;
  double estimator = 0.0;
  double regularizer_norm = 0.0;
  int iterations = 0;
  double eps = 0.0;
};

/// Normal equations sum B^T G B + sum Q + eps^2 H solved by PCG.
SolveReport solve_spd(const LsProblem& problem, double tol = 1e-10, int maxit = -1);
/// Symmetric indefinite system with the lifted residuals as extra unknowns,
/// solved densely; `lifted` receives one v per dual block.
SolveReport solve_mixed(const LsProblem& problem, std::vector<Vector>* lifted = nullptr);
/// Residual parts and monitor for a given trial vector.
SolveReport evaluate(const LsProblem& problem, const Vector& u);

DenseMatrix dense_spd_matrix(const LsProblem& problem);
/// Cholesky of the dense normal matrix succeeds.
bool is_injective(const LsProblem& problem);

enum class EpsKind { Zero, Tau, TauPlusH, Fixed };
struct EpsStrategy {
  EpsKind kind = EpsKind::Zero;
  double value = 0.0;
};
double epsilon_strategy(const EpsStrategy& s, double tau, double h);
EpsStrategy parse_eps(const std::string& text);
std::string to_string(const EpsStrategy& s);

double residual_estimator(const SolveReport& report);

/// Truth dual norm of (Id - Q)'g: g_truth - Q^T g_test measured with the
/// inverse truth Gram matrix.
double data_oscillation(const Vector& g_truth, const Vector& g_test, const SparseMatrix& Q,
                        const SparseMatrix& gram_truth);

}  // namespace lsfem
