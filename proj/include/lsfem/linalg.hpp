#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <stdexcept>
#include <string>

namespace lsfem {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
/// Row-major compressed storage (CSR).
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplets = std::vector<Eigen::Triplet<double, int>>;

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sorted columns, duplicates summed, explicit zeros removed.
SparseMatrix make_sparse(Eigen::Index rows, Eigen::Index cols, const Triplets& t);
void finalize(SparseMatrix& A);
bool is_symmetric(const SparseMatrix& A, double tol = 0.0);

/// Apply-only operator.
struct LinearOperator {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::function<void(const Vector&, Vector&)> apply;
  bool symmetric = false;
  bool positive_definite = false;

  Vector operator*(const Vector& x) const {
    Vector y(rows);
    apply(x, y);
    return y;
  }
};

/// Wraps A by reference; A must outlive the operator.
LinearOperator make_operator(const SparseMatrix& A, bool spd = false);
LinearOperator make_operator(const DenseMatrix& A, bool spd = false);
LinearOperator identity_operator(Eigen::Index n);
/// Columns A e_j assembled into a dense matrix.
DenseMatrix to_dense(const LinearOperator& A);

struct PcgResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
};

class PcgError : public LinalgError {
 public:
  PcgError(const std::string& what, Vector best, int iterations)
      : LinalgError(what), best_iterate(std::move(best)), iterations(iterations) {}
  Vector best_iterate;
  int iterations;
};

/// Preconditioned CG; stops when sqrt(r.Mr) <= tol * sqrt(b.Mb).
/// maxit < 0 selects 10 n.
PcgResult pcg(const LinearOperator& A, const Vector& b, const LinearOperator& M, double tol = 1e-10,
              int maxit = -1, const Vector* x0 = nullptr);

/// LDL^T with symmetric pivoting when `symmetric`, LU otherwise (LAPACK).
Vector dense_solve(const DenseMatrix& A, const Vector& b, bool symmetric = true);

struct EigRange {
  double min = 0.0;
  double max = 0.0;
};

/// Extreme eigenvalues of A x = lambda B x, A and B symmetric, B positive
/// definite. Dense reduction for n <= dense_limit, LOBPCG otherwise.
EigRange extreme_geneig(const LinearOperator& A, const LinearOperator& B, int block = 4,
                        Eigen::Index dense_limit = 2000);
double min_geneig(const LinearOperator& A, const LinearOperator& B, int block = 4);
double max_geneig(const LinearOperator& A, const LinearOperator& B, int block = 4);

/// LOBPCG for the smallest (largest when `largest`) eigenvalue.
double lobpcg(const LinearOperator& A, const LinearOperator& B, int block, bool largest,
              double tol = 1e-8, int maxit = 2000);

/// Spectrum bounds of G A for SPD G and A (dense).
EigRange spectrum_of_product(const LinearOperator& G, const SparseMatrix& A);

/// Least-squares slope of log(y) against log(x) over the last `points` entries.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t points);

}  // namespace lsfem
