#include "lsfem/infsup.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "lsfem/precond.hpp"
#include "lsfem/problems.hpp"

namespace lsfem {

namespace {

using ColSparse = Eigen::SparseMatrix<double>;

std::uint64_t key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

double dist(const Point& p, const Point& q) { return std::hypot(p.x - q.x, p.y - q.y); }

/// Midpoints created between the root mesh and `fine`, keyed by the bisected edge.
class MidpointMap {
 public:
  explicit MidpointMap(const Mesh2D& fine) {
    for (const Mesh2D* m = &fine; m->parent(); m = m->parent().get()) {
      const auto nc = static_cast<Index>(m->parent()->num_vertices());
      const auto& np = m->new_vertex_parents();
      for (Index v = nc; v < static_cast<Index>(m->num_vertices()); ++v) mid_.emplace(key(np[v - nc][0], np[v - nc][1]), v);
    }
  }

  std::optional<Index> midpoint(Index a, Index b) const {
    auto it = mid_.find(key(a, b));
    if (it == mid_.end()) return std::nullopt;
    return it->second;
  }

  /// Pieces of segment (a, b) in the fine mesh, ordered from a to b.
  void split(Index a, Index b, std::vector<std::array<Index, 2>>& out) const {
    const auto m = midpoint(a, b);
    if (!m) {
      out.push_back({a, b});
      return;
    }
    split(a, *m, out);
    split(*m, b, out);
  }

 private:
  std::unordered_map<std::uint64_t, Index> mid_;
};

bool is_ancestor(const Mesh2D& coarse, const Mesh2D& fine) {
  for (const Mesh2D* m = &fine; m; m = m->parent().get()) {
    if (m == &coarse) return true;
  }
  return false;
}

std::unordered_map<std::uint64_t, bool> constrained_boundary(const Mesh2D& mesh, const std::set<BoundaryTag>& tags) {
  std::unordered_map<std::uint64_t, bool> out;
  for (const auto& e : mesh.boundary_edges()) {
    if (tags.count(e.tag)) out[key(e.v[0], e.v[1])] = true;
  }
  return out;
}

/// Row functional int_(a,b) w v over the pieces of (a, b) in `space`, with w
/// linear along the segment taking wa at a and wb at b.
void edge_functional(const FeSpace& space, const MidpointMap& map, Index a, Index b, double wa, double wb, Index row,
                     Triplets& t) {
  const auto& P = space.mesh()->vertices();
  const double len = dist(P[a], P[b]);
  std::vector<std::array<Index, 2>> pieces;
  map.split(a, b, pieces);
  for (const auto& [p, q] : pieces) {
    const double sp = dist(P[a], P[p]) / len, sq = dist(P[a], P[q]) / len;
    const double fp = wa + (wb - wa) * sp, fq = wa + (wb - wa) * sq;
    const double L = dist(P[p], P[q]);
    const Index dp = space.dof(p), dq = space.dof(q);
    if (dp >= 0) t.emplace_back(row, dp, L / 6.0 * (2.0 * fp + fq));
    if (dq >= 0) t.emplace_back(row, dq, L / 6.0 * (fp + 2.0 * fq));
  }
}

ColSparse col(const SparseMatrix& A) { return ColSparse(A); }

double max_abs(const DenseMatrix& A) { return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff(); }

/// Largest eigenvalue of (Q^T Gy Q, Gt) given M = Q Gt^{-1} Q^T.
double norm_from_reduced(const DenseMatrix& M, const DenseMatrix& gram_test) {
  Eigen::LLT<DenseMatrix> llt(gram_test);
  if (llt.info() != Eigen::Success) throw InfSupError("test Gram matrix is not positive definite");
  const DenseMatrix L = llt.matrixL();
  DenseMatrix S = L.transpose() * M * L;
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(S, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// 1D tensor-factor helpers for the heat check.
enum class Basis1D { P1Free, P1Zero, DG };

std::size_t basis_size(Basis1D k, std::size_t elements) {
  switch (k) {
    case Basis1D::P1Free: return elements + 1;
    case Basis1D::P1Zero: return elements - 1;
    case Basis1D::DG: return 2 * elements;
  }
  return 0;
}

struct Eval1D {
  int dof[2];
  double val[2];
  double der[2];
};

Eval1D eval_1d(const IntervalMesh& m, Basis1D k, double s) {
  const std::size_t e = m.locate(s);
  const double a = m.breakpoints()[e], b = m.breakpoints()[e + 1], h = b - a;
  Eval1D r{};
  r.val[0] = (b - s) / h;
  r.val[1] = (s - a) / h;
  r.der[0] = -1.0 / h;
  r.der[1] = 1.0 / h;
  const auto n = static_cast<int>(m.num_elements());
  for (int i = 0; i < 2; ++i) {
    const int node = static_cast<int>(e) + i;
    switch (k) {
      case Basis1D::P1Free: r.dof[i] = node; break;
      case Basis1D::P1Zero: r.dof[i] = (node == 0 || node == n) ? -1 : node - 1; break;
      case Basis1D::DG: r.dof[i] = 2 * static_cast<int>(e) + i; break;
    }
  }
  return r;
}

/// int d^dt(test) d^dz(trial) over the elements of `quad_mesh`, which refines both meshes.
DenseMatrix pair_1d(const IntervalMesh& quad_mesh, const IntervalMesh& test_mesh, Basis1D test_kind,
                    const IntervalMesh& trial_mesh, Basis1D trial_kind, int dt, int dz) {
  const LineRule rule = gauss_legendre(3);
  DenseMatrix A = DenseMatrix::Zero(static_cast<Eigen::Index>(basis_size(test_kind, test_mesh.num_elements())),
                                    static_cast<Eigen::Index>(basis_size(trial_kind, trial_mesh.num_elements())));
  for (std::size_t e = 0; e < quad_mesh.num_elements(); ++e) {
    const double a = quad_mesh.breakpoints()[e], h = quad_mesh.element_length(e);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double s = a + h * rule.points[q];
      const Eval1D v = eval_1d(test_mesh, test_kind, s);
      const Eval1D z = eval_1d(trial_mesh, trial_kind, s);
      for (int i = 0; i < 2; ++i) {
        if (v.dof[i] < 0) continue;
        for (int j = 0; j < 2; ++j) {
          if (z.dof[j] < 0) continue;
          A(v.dof[i], z.dof[j]) += h * rule.weights[q] * (dt ? v.der[i] : v.val[i]) * (dz ? z.der[j] : z.val[j]);
        }
      }
    }
  }
  return A;
}

IntervalMeshPtr red_times(IntervalMeshPtr m, int times) {
  for (int k = 0; k < times; ++k) m = red_refine_interval(m);
  return m;
}

DenseMatrix kron_sum(const std::vector<std::pair<DenseMatrix, DenseMatrix>>& terms) {
  const Eigen::Index nt = terms.front().first.rows(), nx = terms.front().second.rows();
  DenseMatrix S = DenseMatrix::Zero(nt * nx, nt * nx);
  for (const auto& [T, X] : terms) {
    for (Eigen::Index i = 0; i < nt; ++i) {
      for (Eigen::Index j = 0; j < nt; ++j) {
        if (T(i, j) != 0.0) S.block(i * nx, j * nx, nx, nx) += T(i, j) * X;
      }
    }
  }
  return 0.5 * (S + S.transpose());
}

/// B^T G^{-1} B for B = Dt (x) Mx + Ct (x) Kx and G = Mt (x) Ax.
DenseMatrix heat_schur(const IntervalMeshPtr& time_trial, const IntervalMeshPtr& space_trial,
                       const IntervalMeshPtr& time_test, const IntervalMeshPtr& space_test) {
  const DenseMatrix Dt = pair_1d(*time_test, *time_test, Basis1D::DG, *time_trial, Basis1D::P1Free, 0, 1);
  const DenseMatrix Ct = pair_1d(*time_test, *time_test, Basis1D::DG, *time_trial, Basis1D::P1Free, 0, 0);
  const DenseMatrix Mt = pair_1d(*time_test, *time_test, Basis1D::DG, *time_test, Basis1D::DG, 0, 0);
  const DenseMatrix Mx = pair_1d(*space_test, *space_test, Basis1D::P1Zero, *space_trial, Basis1D::P1Free, 0, 0);
  const DenseMatrix Kx = pair_1d(*space_test, *space_test, Basis1D::P1Zero, *space_trial, Basis1D::P1Free, 1, 1);
  const DenseMatrix Ax = pair_1d(*space_test, *space_test, Basis1D::P1Zero, *space_test, Basis1D::P1Zero, 0, 0) +
                         pair_1d(*space_test, *space_test, Basis1D::P1Zero, *space_test, Basis1D::P1Zero, 1, 1);
  const Eigen::LLT<DenseMatrix> lt(Mt), lx(Ax);
  if (lt.info() != Eigen::Success || lx.info() != Eigen::Success) throw InfSupError("heat Gram factor is singular");
  const DenseMatrix iD = lt.solve(Dt), iC = lt.solve(Ct);
  const DenseMatrix iM = lx.solve(Mx), iK = lx.solve(Kx);
  return kron_sum({{Dt.transpose() * iD, Mx.transpose() * iM},
                   {Dt.transpose() * iC, Mx.transpose() * iK},
                   {Ct.transpose() * iD, Kx.transpose() * iM},
                   {Ct.transpose() * iC, Kx.transpose() * iK}});
}

InfSupReport p1_sweep(const std::string& name, MeshPtr initial, FormKind form, const std::set<BoundaryTag>& tags,
                      const std::vector<int>& levels, int truth_extra, bool fortin) {
  InfSupReport rep;
  rep.name = name;
  rep.truth_levels_extra = truth_extra;
  for (int level : levels) {
    const auto meshes = make_hierarchy(initial, level + 2 + truth_extra);
    const FeSpace X = p1_space(meshes[static_cast<std::size_t>(level)]);
    const FeSpace Y = p1_space(meshes[static_cast<std::size_t>(level + 2)], tags);
    const FeSpace T = p1_space(meshes.back(), tags);
    const SparseMatrix By = assemble({form}, X, Y), Bt = assemble({form}, X, T);
    const SparseMatrix Gy = assemble({FormKind::H1Gram}, Y, Y), Gt = assemble({FormKind::H1Gram}, T, T);
    rep.levels.push_back(level);
    rep.trial_dofs.push_back(X.size());
    rep.rho.push_back(estimate_infsup(By, Gy, Bt, Gt));
    if (fortin) {
      const SparseMatrix Q = build_fortin_poisson(X, Y, T);
      rep.fortin_norm.push_back(fortin_norm(Q, Gy, Gt));
      rep.orthogonality.push_back(fortin_orthogonality(By, Bt, Q));
    }
  }
  return rep;
}

}  // namespace

DenseMatrix dual_schur(const SparseMatrix& B, const SparseMatrix& gram) {
  Eigen::SimplicialLLT<ColSparse> llt{col(gram)};
  if (llt.info() != Eigen::Success) throw InfSupError("Gram matrix is not positive definite");
  const DenseMatrix Bd(B);
  const DenseMatrix Z = llt.solve(Bd);
  DenseMatrix S = Bd.transpose() * Z;
  return 0.5 * (S + S.transpose());
}

DenseMatrix dual_schur(const SparseMatrix& B, const DenseMatrix& gram) {
  Eigen::LLT<DenseMatrix> llt(gram);
  if (llt.info() != Eigen::Success) throw InfSupError("Gram matrix is not positive definite");
  const DenseMatrix Bd(B);
  DenseMatrix S = Bd.transpose() * llt.solve(Bd);
  return 0.5 * (S + S.transpose());
}

double estimate_infsup(const DenseMatrix& S_test, const DenseMatrix& S_truth, double kernel_tol) {
  if (S_test.rows() != S_truth.rows() || S_test.cols() != S_truth.cols()) throw InfSupError("pencil size mismatch");
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(S_truth);
  const Vector& lam = es.eigenvalues();
  const double lmax = lam.size() ? lam.maxCoeff() : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] > kernel_tol * lmax) keep.push_back(i);
  }
  if (!(lmax > 0.0) || keep.empty()) throw InfSupError("the whole trial space lies in the kernel of B");
  DenseMatrix W(S_truth.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    W.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]) / std::sqrt(lam[keep[k]]);
  }
  DenseMatrix R = W.transpose() * S_test * W;
  R = 0.5 * (R + R.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> er(R, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, er.eigenvalues().minCoeff()));
}

double estimate_infsup(const SparseMatrix& B_test, const SparseMatrix& gram_test, const SparseMatrix& B_truth,
                       const SparseMatrix& gram_truth, double kernel_tol) {
  return estimate_infsup(dual_schur(B_test, gram_test), dual_schur(B_truth, gram_truth), kernel_tol);
}

SparseMatrix build_fortin_poisson(const FeSpace& X, const FeSpace& Y, const FeSpace& truth) {
  if (X.on_interval() || Y.on_interval() || truth.on_interval() || X.kind() != SpaceKind::P1Continuous ||
      Y.kind() != SpaceKind::P1Continuous || truth.kind() != SpaceKind::P1Continuous) {
    throw InfSupError("Fortin operator needs 2D P1 spaces");
  }
  const Mesh2D& mx = *X.mesh();
  const Mesh2D& my = *Y.mesh();
  const Mesh2D& mt = *truth.mesh();
  if (!is_ancestor(mx, my) || !is_ancestor(my, mt)) throw InfSupError("meshes are not nested");
  if (Y.constraint_tags() != truth.constraint_tags()) throw InfSupError("Y and truth constraints differ");
  const MidpointMap to_y(my), to_t(mt);
  const auto& tags = Y.constraint_tags();
  const auto& Py = my.vertices();

  // Scott-Zhang: one admissible Y edge per Y dof, smallest sorted vertex pair first.
  const auto cy = constrained_boundary(my, tags);
  std::vector<std::array<Index, 2>> chosen(Y.size(), {-1, -1});
  for (const auto& e : my.edges()) {
    if (cy.count(key(e[0], e[1]))) continue;
    for (int s = 0; s < 2; ++s) {
      const Index d = Y.dof(e[s]);
      if (d < 0) continue;
      auto& c = chosen[static_cast<std::size_t>(d)];
      if (c[0] < 0 || std::minmax(e[0], e[1]) < std::minmax(c[0], c[1])) c = {e[0], e[1]};
    }
  }
  Triplets tj;
  for (std::size_t d = 0; d < chosen.size(); ++d) {
    const Index a = Y.entity(static_cast<Index>(d));
    if (chosen[d][0] < 0) throw InfSupError("no admissible edge for a test vertex");
    const Index b = chosen[d][0] == a ? chosen[d][1] : chosen[d][0];
    const double len = dist(Py[a], Py[b]);
    edge_functional(truth, to_t, a, b, 4.0 / len, -2.0 / len, static_cast<Index>(d), tj);
  }
  const SparseMatrix J = make_sparse(static_cast<Index>(Y.size()), static_cast<Index>(truth.size()), tj);

  // Edge-mean corrections on X edges not contained in the constrained boundary.
  const auto cx = constrained_boundary(mx, tags);
  Triplets tt, ty, tphi;
  Index row = 0;
  for (const auto& e : mx.edges()) {
    if (cx.count(key(e[0], e[1]))) continue;
    const auto m = to_y.midpoint(e[0], e[1]);
    if (!m || Y.dof(*m) < 0) throw InfSupError("missing edge-interior vertex in the test mesh");
    edge_functional(truth, to_t, e[0], e[1], 1.0, 1.0, row, tt);
    edge_functional(Y, to_y, e[0], e[1], 1.0, 1.0, row, ty);
    // int_e phi_e with phi_e the hat at the midpoint: two pieces, |e|/2 in total.
    tphi.emplace_back(Y.dof(*m), row, 2.0 / dist(Py[e[0]], Py[e[1]]));
    ++row;
  }
  const SparseMatrix Et = make_sparse(row, static_cast<Index>(truth.size()), tt);
  const SparseMatrix Ey = make_sparse(row, static_cast<Index>(Y.size()), ty);
  const SparseMatrix Phi = make_sparse(static_cast<Index>(Y.size()), row, tphi);
  const SparseMatrix EyJ = Ey * J;
  const SparseMatrix defect = Et - EyJ;
  const SparseMatrix correction = Phi * defect;
  SparseMatrix Q = J + correction;
  Q.prune(0.0);
  return Q;
}

double fortin_norm(const SparseMatrix& Q, const SparseMatrix& gram_test, const SparseMatrix& gram_truth) {
  Eigen::SimplicialLLT<ColSparse> llt{col(gram_truth)};
  if (llt.info() != Eigen::Success) throw InfSupError("truth Gram matrix is not positive definite");
  const DenseMatrix Z = llt.solve(DenseMatrix(Q.transpose()));
  DenseMatrix M = Q * Z;
  M = 0.5 * (M + M.transpose());
  return norm_from_reduced(M, DenseMatrix(gram_test));
}

double fortin_norm(const DenseMatrix& Q, const DenseMatrix& gram_test, const DenseMatrix& gram_truth) {
  Eigen::LLT<DenseMatrix> llt(gram_truth);
  if (llt.info() != Eigen::Success) throw InfSupError("truth Gram matrix is not positive definite");
  DenseMatrix M = Q * llt.solve(DenseMatrix(Q.transpose()));
  M = 0.5 * (M + M.transpose());
  return norm_from_reduced(M, gram_test);
}

double fortin_orthogonality(const SparseMatrix& B_test, const SparseMatrix& B_truth, const SparseMatrix& Q) {
  const SparseMatrix Bt = B_truth.transpose();
  const SparseMatrix BQ = SparseMatrix(B_test.transpose()) * Q;
  const SparseMatrix D = Bt - BQ;
  double m = 0.0;
  for (Eigen::Index k = 0; k < D.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(D, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

double fortin_orthogonality(const SparseMatrix& B_test, const SparseMatrix& B_truth, const DenseMatrix& Q) {
  return max_abs(DenseMatrix(B_truth.transpose()) - DenseMatrix(B_test.transpose()) * Q);
}

SparseMatrix hat_p0_pairing(const IntervalMesh& p1_mesh, const IntervalMesh& p0_mesh) {
  const auto& bp = p0_mesh.breakpoints();
  const auto& cp = p1_mesh.breakpoints();
  Triplets t;
  for (std::size_t f = 0; f + 1 < bp.size(); ++f) {
    const std::size_t e = p1_mesh.locate(0.5 * (bp[f] + bp[f + 1]));
    const double h = cp[e + 1] - cp[e];
    const double len = bp[f + 1] - bp[f];
    const double mid = 0.5 * (bp[f] + bp[f + 1]);
    // Hats are linear on the element, so the midpoint rule is exact.
    t.emplace_back(static_cast<Index>(f), static_cast<Index>(e), len * (cp[e + 1] - mid) / h);
    t.emplace_back(static_cast<Index>(f), static_cast<Index>(e + 1), len * (mid - cp[e]) / h);
  }
  return make_sparse(static_cast<Index>(p0_mesh.num_elements()), static_cast<Index>(cp.size()), t);
}

DenseMatrix build_dual_basis_trace(const IntervalMeshPtr& coarse, const IntervalMeshPtr& fine) {
  const auto& cp = coarse->breakpoints();
  const auto& fp = fine->breakpoints();
  if (fine->num_elements() != 2 * coarse->num_elements()) throw InfSupError("fine mesh is not a red refinement");
  const DenseMatrix pair = DenseMatrix(hat_p0_pairing(*coarse, *fine));
  const std::size_t nv = cp.size();
  DenseMatrix psi = DenseMatrix::Zero(static_cast<Eigen::Index>(fine->num_elements()), static_cast<Eigen::Index>(nv));
  for (std::size_t v = 0; v < nv; ++v) {
    double patch = 0.0;
    if (v > 0) patch += cp[v] - cp[v - 1];
    if (v + 1 < nv) patch += cp[v + 1] - cp[v];
    // Per adjacent coarse element: values on its two halves, orthogonal to the
    // other hat of the element and carrying that element's share of the diagonal.
    for (int side : {-1, 1}) {
      if ((side < 0 && v == 0) || (side > 0 && v + 1 == nv)) continue;
      const std::size_t e = side < 0 ? v - 1 : v;
      const std::size_t other = side < 0 ? v - 1 : v + 1;
      const std::size_t f0 = 2 * e, f1 = 2 * e + 1;
      if (std::abs(fp[f0 + 1] - 0.5 * (cp[e] + cp[e + 1])) > 1e-12 * (cp[e + 1] - cp[e])) {
        throw InfSupError("fine mesh is not a red refinement");
      }
      Eigen::Matrix2d A;
      A << pair(static_cast<Eigen::Index>(f0), static_cast<Eigen::Index>(other)),
          pair(static_cast<Eigen::Index>(f1), static_cast<Eigen::Index>(other)),
          pair(static_cast<Eigen::Index>(f0), static_cast<Eigen::Index>(v)),
          pair(static_cast<Eigen::Index>(f1), static_cast<Eigen::Index>(v));
      const Eigen::Vector2d rhs(0.0, (cp[e + 1] - cp[e]) / patch);
      const Eigen::Vector2d c = A.fullPivLu().solve(rhs);
      psi(static_cast<Eigen::Index>(f0), static_cast<Eigen::Index>(v)) = c[0];
      psi(static_cast<Eigen::Index>(f1), static_cast<Eigen::Index>(v)) = c[1];
    }
  }
  return psi;
}

double element_bubble_infsup(int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  const std::vector<Point> P{{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}};
  const std::vector<BoundaryEdge> be{{{0, 1}, BoundaryTag::Other, ""},
                                     {{1, 2}, BoundaryTag::Other, ""},
                                     {{2, 0}, BoundaryTag::Other, ""}};
  const auto meshes = make_hierarchy(std::make_shared<const Mesh2D>(P, std::vector<Triangle>{{0, 1, 2}}, be), depth);
  const FeSpace p1 = p1_space(meshes.front());
  const FeSpace bubbles = p1_space(meshes.back(), {BoundaryTag::Other});
  if (bubbles.size() < 3) return 0.0;
  const DenseMatrix C(assemble({FormKind::L2Mass}, p1, bubbles));
  const DenseMatrix Mp(assemble({FormKind::L2Mass}, p1, p1));
  const DenseMatrix Mb(assemble({FormKind::L2Mass}, bubbles, bubbles));
  const DenseMatrix Lb = Eigen::LLT<DenseMatrix>(Mb).matrixL();
  const DenseMatrix Lp = Eigen::LLT<DenseMatrix>(Mp).matrixL();
  const DenseMatrix W = Lb.triangularView<Eigen::Lower>().solve(C);
  const DenseMatrix R = Lp.triangularView<Eigen::Lower>().solve(W.transpose()).transpose();
  Eigen::JacobiSVD<DenseMatrix> svd(R);
  return svd.singularValues().minCoeff();
}

double interval_bubble_infsup(int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  const IntervalMeshPtr coarse = make_interval_mesh(0.0, 1.0, 1);
  const IntervalMeshPtr fine = red_times(coarse, depth);
  if (basis_size(Basis1D::P1Zero, fine->num_elements()) < 2) return 0.0;
  const DenseMatrix C = pair_1d(*fine, *fine, Basis1D::P1Zero, *coarse, Basis1D::P1Free, 0, 0);
  const DenseMatrix Mp = pair_1d(*coarse, *coarse, Basis1D::P1Free, *coarse, Basis1D::P1Free, 0, 0);
  const DenseMatrix Mb = pair_1d(*fine, *fine, Basis1D::P1Zero, *fine, Basis1D::P1Zero, 0, 0);
  const DenseMatrix Lb = Eigen::LLT<DenseMatrix>(Mb).matrixL();
  const DenseMatrix Lp = Eigen::LLT<DenseMatrix>(Mp).matrixL();
  const DenseMatrix W = Lb.triangularView<Eigen::Lower>().solve(C);
  const DenseMatrix R = Lp.triangularView<Eigen::Lower>().solve(W.transpose()).transpose();
  Eigen::JacobiSVD<DenseMatrix> svd(R);
  return svd.singularValues().minCoeff();
}

InfSupReport cauchy_infsup_sweep(const std::vector<int>& levels, int truth_extra, bool fortin) {
  return p1_sweep("cauchy_b1", make_cauchy_initial(), FormKind::H1Stiffness, {BoundaryTag::SigmaComplement}, levels,
                  truth_extra, fortin);
}

InfSupReport wave_infsup_sweep(const std::vector<int>& levels, int truth_extra, bool fortin) {
  return p1_sweep("wave", make_spacetime_initial(Box{0.0, 1.0, 0.0, 1.0}), FormKind::WaveForm,
                  {BoundaryTag::LateralBoundary, BoundaryTag::InitialTime, BoundaryTag::FinalTime}, levels, truth_extra,
                  fortin);
}

InfSupReport trace_infsup_sweep(const std::vector<int>& levels, int truth_extra, bool fortin) {
  InfSupReport rep;
  rep.name = "trace";
  rep.truth_levels_extra = truth_extra;
  for (int k : levels) {
    const IntervalMeshPtr E = make_interval_mesh(0.0, std::numbers::pi, static_cast<std::size_t>(3) << k);
    const IntervalMeshPtr Es = red_refine_interval(E);
    const IntervalMeshPtr T = red_times(Es, truth_extra);
    const FractionalNormOracle oracle(red_refine_interval(T), false);
    const DenseMatrix Gy = oracle.p0_gram(p0_space(Es)), Gt = oracle.p0_gram(p0_space(T));
    const SparseMatrix By = hat_p0_pairing(*E, *Es), Bt = hat_p0_pairing(*E, *T);
    rep.levels.push_back(k);
    rep.trial_dofs.push_back(E->num_elements() + 1);
    rep.rho.push_back(estimate_infsup(dual_schur(By, Gy), dual_schur(Bt, Gt)));
    if (fortin) {
      const DenseMatrix Q = build_dual_basis_trace(E, Es) * DenseMatrix(Bt.transpose());
      rep.fortin_norm.push_back(fortin_norm(Q, Gy, Gt));
      rep.orthogonality.push_back(fortin_orthogonality(By, Bt, Q));
    }
  }
  return rep;
}

InfSupReport verify_heat_tensor_infsup(const std::vector<int>& levels, int spatial_depth, int truth_extra) {
  InfSupReport rep;
  rep.name = "heat_tensor";
  rep.truth_levels_extra = truth_extra;
  rep.bubble_constant = interval_bubble_infsup(spatial_depth);
  rep.flagged = rep.bubble_constant <= 1e-12;
  for (int l : levels) {
    const IntervalMeshPtr It = make_interval_mesh(0.0, 1.0, static_cast<std::size_t>(1) << l);
    const IntervalMeshPtr Ix = make_interval_mesh(0.0, 1.0, static_cast<std::size_t>(1) << l);
    const IntervalMeshPtr Xs = red_times(Ix, spatial_depth);
    const DenseMatrix S_test = heat_schur(It, Ix, It, Xs);
    const DenseMatrix S_truth = heat_schur(It, Ix, red_times(It, truth_extra), red_times(Xs, truth_extra));
    rep.levels.push_back(l);
    rep.trial_dofs.push_back(static_cast<std::size_t>(S_test.rows()));
    rep.rho.push_back(estimate_infsup(S_test, S_truth));
  }
  return rep;
}

double cauchy_data_oscillation(int level, int truth_extra) {
  const auto meshes = make_hierarchy(make_cauchy_initial(), level + 2 + truth_extra);
  const std::set<BoundaryTag> tags{BoundaryTag::SigmaComplement};
  const FeSpace X = p1_space(meshes[static_cast<std::size_t>(level)]);
  const FeSpace Y = p1_space(meshes[static_cast<std::size_t>(level + 2)], tags);
  const FeSpace T = p1_space(meshes.back(), tags);
  const SparseMatrix Q = build_fortin_poisson(X, Y, T);
  return data_oscillation(cauchy_y1_load(T), cauchy_y1_load(Y), Q, assemble({FormKind::H1Gram}, T, T));
}

}  // namespace lsfem
