#include "lsfem/solver.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>

namespace lsfem {

LinearOperator LsProblem::spd_operator() const {
  LinearOperator op;
  op.rows = op.cols = n;
  op.symmetric = op.positive_definite = true;
  op.apply = [this](const Vector& x, Vector& y) {
    y = Vector::Zero(n);
    Vector w;
    for (const auto& b : dual_blocks) {
      b.G.apply(b.B * x, w);
      y.noalias() += b.B.transpose() * w;
    }
    for (const auto& b : l2_blocks) y.noalias() += b.Q * x;
    if (regularizer && regularizer->eps > 0.0) y.noalias() += (regularizer->eps * regularizer->eps) * (regularizer->H * x);
  };
  return op;
}

Vector LsProblem::spd_rhs() const {
  Vector rhs = Vector::Zero(n);
  Vector w;
  for (const auto& b : dual_blocks) {
    b.G.apply(b.g, w);
    rhs.noalias() += b.B.transpose() * w;
  }
  for (const auto& b : l2_blocks) rhs += b.r;
  return rhs;
}

SolveReport evaluate(const LsProblem& problem, const Vector& u) {
  SolveReport rep;
  rep.u = u;
  Vector w;
  for (const auto& b : problem.dual_blocks) {
    const Vector res = b.g - b.B * u;
    b.G.apply(res, w);
    rep.dual_parts.push_back(std::max(0.0, res.dot(w)));
  }
  for (const auto& b : problem.l2_blocks) {
    rep.l2_parts.push_back(std::max(0.0, u.dot(b.Q * u) - 2.0 * u.dot(b.r) + b.hh));
  }
  rep.estimator = residual_estimator(rep);
  if (problem.regularizer) {
    rep.regularizer_norm = std::sqrt(std::max(0.0, u.dot(problem.regularizer->H * u)));
    rep.eps = problem.regularizer->eps;
  }
  return rep;
}

SolveReport solve_spd(const LsProblem& problem, double tol, int maxit) {
  const LinearOperator A = problem.spd_operator();
  const Vector b = problem.spd_rhs();
  const LinearOperator M = problem.preconditioner.apply ? problem.preconditioner : identity_operator(problem.n);
  PcgResult res;
  try {
    res = pcg(A, b, M, tol, maxit);
  } catch (const PcgError& e) {
    if (std::string(e.what()).find("positive definite") != std::string::npos) {
      throw SolverError(std::string(e.what()) +
                        "; the discrete operator is singular without regularisation, choose eps > 0 "
                        "and monitor |L u|_H");
    }
    throw;
  }
  SolveReport rep = evaluate(problem, res.x);
  rep.iterations = res.iterations;
  return rep;
}

DenseMatrix dense_spd_matrix(const LsProblem& problem) {
  DenseMatrix A = to_dense(problem.spd_operator());
  return 0.5 * (A + A.transpose());
}

bool is_injective(const LsProblem& problem) {
  Eigen::LLT<DenseMatrix> llt(dense_spd_matrix(problem));
  return llt.info() == Eigen::Success;
}

SolveReport solve_mixed(const LsProblem& problem, std::vector<Vector>* lifted) {
  const Eigen::Index n = problem.n;
  std::vector<Eigen::Index> off{0};
  for (const auto& b : problem.dual_blocks) off.push_back(off.back() + b.B.rows());
  const Eigen::Index m = off.back();
  DenseMatrix K = DenseMatrix::Zero(m + n, m + n);
  Vector rhs = Vector::Zero(m + n);
  for (std::size_t k = 0; k < problem.dual_blocks.size(); ++k) {
    const auto& b = problem.dual_blocks[k];
    DenseMatrix G = to_dense(b.G);
    G = 0.5 * (G + G.transpose());
    Eigen::LLT<DenseMatrix> llt(G);
    if (llt.info() != Eigen::Success) throw SolverError("mixed solve: preconditioner is not positive definite");
    DenseMatrix Ginv = llt.solve(DenseMatrix::Identity(G.rows(), G.cols()));
    Ginv = 0.5 * (Ginv + Ginv.transpose());
    const Eigen::Index mk = off[k + 1] - off[k];
    K.block(off[k], off[k], mk, mk) = Ginv;
    const DenseMatrix B = DenseMatrix(b.B);
    K.block(off[k], m, mk, n) = B;
    K.block(m, off[k], n, mk) = B.transpose();
    rhs.segment(off[k], mk) = b.g;
  }
  DenseMatrix C = DenseMatrix::Zero(n, n);
  for (const auto& b : problem.l2_blocks) {
    C += DenseMatrix(b.Q);
    rhs.tail(n) -= b.r;
  }
  if (problem.regularizer) C += problem.regularizer->eps * problem.regularizer->eps * DenseMatrix(problem.regularizer->H);
  K.block(m, m, n, n) = -0.5 * (C + C.transpose());
  const Vector x = dense_solve(K, rhs, true);
  SolveReport rep = evaluate(problem, x.tail(n));
  if (lifted) {
    lifted->clear();
    for (std::size_t k = 0; k < problem.dual_blocks.size(); ++k) lifted->push_back(x.segment(off[k], off[k + 1] - off[k]));
  }
  return rep;
}

double epsilon_strategy(const EpsStrategy& s, double tau, double h) {
  if (tau < 0.0 || h < 0.0 || (s.kind == EpsKind::Fixed && s.value < 0.0)) {
    throw std::invalid_argument("epsilon strategy needs nonnegative inputs");
  }
  switch (s.kind) {
    case EpsKind::Zero: return 0.0;
    case EpsKind::Tau: return tau;
    case EpsKind::TauPlusH: return tau + h;
    case EpsKind::Fixed: return s.value;
  }
  return 0.0;
}

EpsStrategy parse_eps(const std::string& text) {
  if (text == "zero" || text == "0") return {EpsKind::Zero, 0.0};
  if (text == "tau") return {EpsKind::Tau, 0.0};
  if (text == "tau_plus_h" || text == "tau+h" || text == "h") return {EpsKind::TauPlusH, 0.0};
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos == text.size() && v >= 0.0) return {EpsKind::Fixed, v};
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("unknown eps strategy '" + text + "' (zero, tau, tau_plus_h or a number)");
}

std::string to_string(const EpsStrategy& s) {
  switch (s.kind) {
    case EpsKind::Zero: return "zero";
    case EpsKind::Tau: return "tau";
    case EpsKind::TauPlusH: return "tau_plus_h";
    case EpsKind::Fixed: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", s.value);
      return buf;
    }
  }
  return "zero";
}

double residual_estimator(const SolveReport& report) {
  double s = 0.0;
  for (double p : report.dual_parts) s += p;
  for (double p : report.l2_parts) s += p;
  return std::sqrt(s);
}

double data_oscillation(const Vector& g_truth, const Vector& g_test, const SparseMatrix& Q,
                        const SparseMatrix& gram_truth) {
  const Vector w = g_truth - Q.transpose() * g_test;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt{Eigen::SparseMatrix<double>(gram_truth)};
  if (llt.info() != Eigen::Success) throw SolverError("truth Gram matrix is not positive definite");
  const Vector z = llt.solve(w);
  return std::sqrt(std::max(0.0, w.dot(z)));
}

}  // namespace lsfem
