#include "lsfem/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace lsfem {

SparseMatrix make_sparse(Eigen::Index rows, Eigen::Index cols, const Triplets& t) {
  SparseMatrix A(rows, cols);
  A.setFromTriplets(t.begin(), t.end());
  finalize(A);
  return A;
}

void finalize(SparseMatrix& A) {
  A.prune(0.0, 0.0);
  A.makeCompressed();
}

bool is_symmetric(const SparseMatrix& A, double tol) {
  if (A.rows() != A.cols()) return false;
  const SparseMatrix At = A.transpose();
  const SparseMatrix D = A - At;
  for (int k = 0; k < D.nonZeros(); ++k) {
    if (std::abs(D.valuePtr()[k]) > tol) return false;
  }
  return true;
}

LinearOperator make_operator(const SparseMatrix& A, bool spd) {
  LinearOperator op;
  op.rows = A.rows();
  op.cols = A.cols();
  op.symmetric = spd;
  op.positive_definite = spd;
  op.apply = [&A](const Vector& x, Vector& y) { y.noalias() = A * x; };
  return op;
}

LinearOperator make_operator(const DenseMatrix& A, bool spd) {
  LinearOperator op;
  op.rows = A.rows();
  op.cols = A.cols();
  op.symmetric = spd;
  op.positive_definite = spd;
  op.apply = [&A](const Vector& x, Vector& y) { y.noalias() = A * x; };
  return op;
}

LinearOperator identity_operator(Eigen::Index n) {
  LinearOperator op;
  op.rows = op.cols = n;
  op.symmetric = op.positive_definite = true;
  op.apply = [](const Vector& x, Vector& y) { y = x; };
  return op;
}

DenseMatrix to_dense(const LinearOperator& A) {
  DenseMatrix D(A.rows, A.cols);
  Vector e = Vector::Zero(A.cols);
  Vector y(A.rows);
  for (Eigen::Index j = 0; j < A.cols; ++j) {
    e[j] = 1.0;
    A.apply(e, y);
    D.col(j) = y;
    e[j] = 0.0;
  }
  return D;
}

PcgResult pcg(const LinearOperator& A, const Vector& b, const LinearOperator& M, double tol, int maxit,
              const Vector* x0) {
  const Eigen::Index n = b.size();
  if (A.rows != n || A.cols != n || M.rows != n) throw LinalgError("pcg: dimension mismatch");
  if (maxit < 0) maxit = static_cast<int>(std::max<Eigen::Index>(10 * n, 10));
  if (!b.allFinite()) throw LinalgError("pcg: non-finite right-hand side");

  PcgResult res;
  res.x = x0 ? *x0 : Vector::Zero(n);
  Vector r = b;
  Vector tmp(n);
  if (x0) {
    A.apply(res.x, tmp);
    r -= tmp;
  }
  Vector z(n);
  M.apply(b, z);
  const double bnorm = std::sqrt(std::max(0.0, b.dot(z)));
  if (bnorm == 0.0) {
    res.x.setZero();
    return res;
  }
  M.apply(r, z);
  double rz = r.dot(z);
  Vector p = z;
  Vector q(n);
  Vector best = res.x;
  double best_res = std::sqrt(std::max(0.0, rz)) / bnorm;
  res.relative_residual = best_res;
  if (best_res <= tol) return res;

  for (int it = 1; it <= maxit; ++it) {
    A.apply(p, q);
    const double pq = p.dot(q);
    if (!std::isfinite(pq)) throw PcgError("pcg: non-finite values", best, it);
    if (pq <= 0.0) {
      throw PcgError("pcg: operator is not positive definite on the Krylov space", best, it);
    }
    const double alpha = rz / pq;
    res.x += alpha * p;
    r -= alpha * q;
    M.apply(r, z);
    const double rz_new = r.dot(z);
    const double rel = std::sqrt(std::max(0.0, rz_new)) / bnorm;
    res.iterations = it;
    res.relative_residual = rel;
    if (rel < best_res) {
      best_res = rel;
      best = res.x;
    }
    if (rel <= tol) return res;
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw PcgError("pcg: iteration limit reached", best, maxit);
}

Vector dense_solve(const DenseMatrix& A, const Vector& b, bool symmetric) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  if (A.cols() != A.rows() || b.size() != A.rows()) throw LinalgError("dense_solve: dimension mismatch");
  if (n == 0) return Vector();
  DenseMatrix F = A;  // column-major copy, overwritten by the factors
  Vector x = b;
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const double anorm = A.cwiseAbs().colwise().sum().maxCoeff();
  double rcond = 0.0;
  lapack_int info = 0;
  if (symmetric) {
    info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, F.data(), n, ipiv.data());
    if (info > 0) throw LinalgError("dense_solve: matrix is singular");
    if (info < 0) throw LinalgError("dense_solve: dsytrf argument error");
    LAPACKE_dsycon(LAPACK_COL_MAJOR, 'L', n, F.data(), n, ipiv.data(), anorm, &rcond);
    if (!(rcond > std::numeric_limits<double>::epsilon())) {
      throw LinalgError("dense_solve: matrix is singular to working precision");
    }
    info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n, 1, F.data(), n, ipiv.data(), x.data(), n);
  } else {
    info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, n, n, F.data(), n, ipiv.data());
    if (info > 0) throw LinalgError("dense_solve: matrix is singular");
    if (info < 0) throw LinalgError("dense_solve: dgetrf argument error");
    LAPACKE_dgecon(LAPACK_COL_MAJOR, '1', n, F.data(), n, anorm, &rcond);
    if (!(rcond > std::numeric_limits<double>::epsilon())) {
      throw LinalgError("dense_solve: matrix is singular to working precision");
    }
    info = LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', n, 1, F.data(), n, ipiv.data(), x.data(), n);
  }
  if (info != 0) throw LinalgError("dense_solve: back substitution failed");
  return x;
}

namespace {

EigRange dense_geneig(const LinearOperator& A, const LinearOperator& B) {
  const DenseMatrix Ad = to_dense(A);
  const DenseMatrix Bd = to_dense(B);
  const DenseMatrix As = 0.5 * (Ad + Ad.transpose());
  const DenseMatrix Bs = 0.5 * (Bd + Bd.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(As, Bs, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw LinalgError("generalized eigensolver failed (B not positive definite?)");
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

DenseMatrix apply_block(const LinearOperator& A, const DenseMatrix& X) {
  DenseMatrix Y(A.rows, X.cols());
  Vector y(A.rows);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    A.apply(X.col(j), y);
    Y.col(j) = y;
  }
  return Y;
}

}  // namespace

double lobpcg(const LinearOperator& A, const LinearOperator& B, int block, bool largest, double tol, int maxit) {
  const Eigen::Index n = A.rows;
  const Eigen::Index k = std::min<Eigen::Index>(std::max(block, 1), n);
  const double sign = largest ? -1.0 : 1.0;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  DenseMatrix X(n, k);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = nd(rng);
  DenseMatrix P;
  double lambda = 0.0;

  for (int it = 0; it < maxit; ++it) {
    DenseMatrix AX = sign * apply_block(A, X);
    DenseMatrix BX = apply_block(B, X);
    const DenseMatrix XAX = X.transpose() * AX;
    const DenseMatrix XBX = X.transpose() * BX;
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> small(0.5 * (XAX + XAX.transpose()),
                                                                0.5 * (XBX + XBX.transpose()));
    if (small.info() != Eigen::Success) throw LinalgError("lobpcg: breakdown in Rayleigh-Ritz");
    X = X * small.eigenvectors();
    AX = AX * small.eigenvectors();
    BX = BX * small.eigenvectors();
    const Vector theta = small.eigenvalues();
    lambda = theta[0];
    DenseMatrix R = AX - BX * theta.asDiagonal();
    const double rn = R.col(0).norm();
    const double scale = std::max(AX.col(0).norm(), std::abs(lambda) * BX.col(0).norm());
    if (rn <= tol * scale) return sign * lambda;

    DenseMatrix basis(n, X.cols() + R.cols() + P.cols());
    basis << X, R, P;
    // B-orthonormalise the trial basis, dropping nearly dependent directions.
    DenseMatrix BS = apply_block(B, basis);
    DenseMatrix SBS = basis.transpose() * BS;
    SBS = 0.5 * (SBS + SBS.transpose());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> gs(SBS);
    const double top = gs.eigenvalues().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < gs.eigenvalues().size(); ++i) {
      if (gs.eigenvalues()[i] > 1e-12 * top) keep.push_back(i);
    }
    DenseMatrix T(basis.cols(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
      T.col(static_cast<Eigen::Index>(i)) = gs.eigenvectors().col(keep[i]) / std::sqrt(gs.eigenvalues()[keep[i]]);
    }
    const DenseMatrix Q = basis * T;
    const DenseMatrix AQ = sign * apply_block(A, Q);
    DenseMatrix QAQ = Q.transpose() * AQ;
    QAQ = 0.5 * (QAQ + QAQ.transpose());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> rr(QAQ);
    if (rr.info() != Eigen::Success) throw LinalgError("lobpcg: breakdown in Rayleigh-Ritz");
    const Eigen::Index m = std::min<Eigen::Index>(k, rr.eigenvalues().size());
    const DenseMatrix C = rr.eigenvectors().leftCols(m);
    const DenseMatrix Xn = Q * C;
    // Search direction: the new iterate without its component along the old X.
    const DenseMatrix coeff = T * C;
    P = basis.rightCols(basis.cols() - X.cols()) * coeff.bottomRows(basis.cols() - X.cols());
    X = Xn;
  }
  throw LinalgError("lobpcg: no convergence");
}

EigRange extreme_geneig(const LinearOperator& A, const LinearOperator& B, int block, Eigen::Index dense_limit) {
  if (A.rows != A.cols || B.rows != B.cols || A.rows != B.rows) throw LinalgError("geneig: dimension mismatch");
  if (A.rows <= dense_limit) return dense_geneig(A, B);
  return {lobpcg(A, B, block, false), lobpcg(A, B, block, true)};
}

double min_geneig(const LinearOperator& A, const LinearOperator& B, int block) {
  if (A.rows <= 2000) return dense_geneig(A, B).min;
  return lobpcg(A, B, block, false);
}

double max_geneig(const LinearOperator& A, const LinearOperator& B, int block) {
  if (A.rows <= 2000) return dense_geneig(A, B).max;
  return lobpcg(A, B, block, true);
}

EigRange spectrum_of_product(const LinearOperator& G, const SparseMatrix& A) {
  const DenseMatrix Gd = to_dense(G);
  const DenseMatrix Ad = DenseMatrix(A);
  Eigen::LLT<DenseMatrix> llt(Ad);
  if (llt.info() != Eigen::Success) throw LinalgError("spectrum_of_product: matrix is not positive definite");
  const DenseMatrix L = llt.matrixL();
  DenseMatrix S = L.transpose() * Gd * L;
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(S, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t points) {
  if (x.size() != y.size()) throw LinalgError("loglog_slope: size mismatch");
  const std::size_t n = std::min(points, x.size());
  if (n < 2) throw LinalgError("loglog_slope: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = x.size() - n; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace lsfem
