#include "lsfem/precond.hpp"

#include <cmath>
#include <numbers>

namespace lsfem {

std::vector<FeSpace> p1_hierarchy(const FeSpace& finest) {
  if (finest.on_interval() || finest.kind() != SpaceKind::P1Continuous) {
    throw SpaceError("p1_hierarchy needs a 2D P1 space");
  }
  std::vector<FeSpace> out{finest};
  MeshPtr m = finest.mesh()->parent();
  while (m) {
    out.push_back(p1_space(m, finest.constraint_tags()));
    m = m->parent();
  }
  return {out.rbegin(), out.rend()};
}

MultilevelH1::MultilevelH1(std::vector<FeSpace> spaces, FormKind kind) : spaces_(std::move(spaces)) {
  if (spaces_.empty()) throw LinalgError("multilevel hierarchy without levels");
  const Form form{kind};
  for (std::size_t l = 0; l < spaces_.size(); ++l) {
    A_.push_back(assemble(form, spaces_[l], spaces_[l]));
    if (l + 1 < spaces_.size()) P_.push_back(lsfem::prolongation(spaces_[l], spaces_[l + 1]));
  }
  if (spaces_[0].size() > 0) {
    coarse_.compute(DenseMatrix(A_[0]));
    if (coarse_.info() != Eigen::Success) throw LinalgError("coarse matrix is not positive definite");
  }
}

void MultilevelH1::vcycle(std::size_t l, const Vector& r, Vector& x) const {
  if (l == 0) {
    x = spaces_[0].size() > 0 ? Vector(coarse_.solve(r)) : Vector();
    cost_ += static_cast<std::size_t>(r.size() * r.size());
    return;
  }
  const SparseMatrix& A = A_[l];
  const Eigen::Index n = A.rows();
  x = Vector::Zero(n);
  auto sweep = [&](bool forward) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index i = forward ? k : n - 1 - k;
      double s = r[i];
      double d = 0.0;
      for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
        if (it.col() == i) {
          d = it.value();
        } else {
          s -= it.value() * x[it.col()];
        }
      }
      x[i] = s / d;
    }
    cost_ += static_cast<std::size_t>(A.nonZeros());
  };
  sweep(true);
  const Vector res = r - A * x;
  const Vector rc = P_[l - 1].transpose() * res;
  Vector xc;
  vcycle(l - 1, rc, xc);
  x += P_[l - 1] * xc;
  cost_ += static_cast<std::size_t>(A.nonZeros() + 2 * P_[l - 1].nonZeros());
  sweep(false);
}

void MultilevelH1::apply(const Vector& r, Vector& x) const {
  cost_ = 0;
  vcycle(spaces_.size() - 1, r, x);
}

LinearOperator MultilevelH1::op() const {
  LinearOperator o;
  o.rows = o.cols = static_cast<Eigen::Index>(spaces_.back().size());
  o.symmetric = o.positive_definite = true;
  o.apply = [this](const Vector& r, Vector& x) { apply(r, x); };
  return o;
}

std::vector<IntervalMeshPtr> interval_chain(const IntervalMeshPtr& coarse, const IntervalMeshPtr& fine) {
  std::vector<IntervalMeshPtr> chain{coarse};
  while (chain.back()->num_elements() < fine->num_elements()) chain.push_back(red_refine_interval(chain.back()));
  if (chain.back()->num_elements() != fine->num_elements()) throw SpaceError("fine mesh is not a red refinement");
  const auto& a = chain.back()->breakpoints();
  const auto& b = fine->breakpoints();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - b[k]) > 1e-12 * std::max(1.0, fine->length())) {
      throw SpaceError("fine mesh is not a red refinement");
    }
  }
  chain.back() = fine;
  return chain;
}

MultilevelHminusHalf::MultilevelHminusHalf(std::vector<IntervalMeshPtr> meshes) : meshes_(std::move(meshes)) {
  if (meshes_.empty()) throw LinalgError("multilevel hierarchy without levels");
  for (std::size_t l = 0; l + 1 < meshes_.size(); ++l) {
    P_.push_back(lsfem::prolongation(p0_space(meshes_[l]), p0_space(meshes_[l + 1])));
  }
  for (std::size_t l = 0; l < meshes_.size(); ++l) {
    const double inv = 1.0 / meshes_[l]->max_length();
    const double next = l + 1 < meshes_.size() ? 1.0 / meshes_[l + 1]->max_length() : 0.0;
    weight_.push_back(inv - next);
  }
}

void MultilevelHminusHalf::apply(const Vector& r, Vector& x) const {
  const std::size_t L = meshes_.size();
  std::vector<Vector> rl(L);
  rl[L - 1] = r;
  for (std::size_t l = L - 1; l > 0; --l) rl[l - 1] = P_[l - 1].transpose() * rl[l];
  Vector y;
  cost_ = 0;
  for (std::size_t l = 0; l < L; ++l) {
    const IntervalMesh& m = *meshes_[l];
    Vector scaled(rl[l].size());
    for (Eigen::Index e = 0; e < scaled.size(); ++e) {
      scaled[e] = weight_[l] * rl[l][e] / m.element_length(static_cast<std::size_t>(e));
    }
    y = l == 0 ? scaled : Vector(P_[l - 1] * y + scaled);
    cost_ += static_cast<std::size_t>(3 * scaled.size());
  }
  x = y;
}

LinearOperator MultilevelHminusHalf::op() const {
  LinearOperator o;
  o.rows = o.cols = static_cast<Eigen::Index>(meshes_.back()->num_elements());
  o.symmetric = o.positive_definite = true;
  o.apply = [this](const Vector& r, Vector& x) { apply(r, x); };
  return o;
}

SparseMatrix interval_stiffness(const FeSpace& s) {
  const auto& bp = s.interval()->breakpoints();
  Triplets t;
  for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
    const double h = bp[e + 1] - bp[e];
    const Index d[2] = {s.dof(static_cast<Index>(e)), s.dof(static_cast<Index>(e + 1))};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        if (d[i] >= 0 && d[j] >= 0) t.emplace_back(d[i], d[j], (i == j ? 1.0 : -1.0) / h);
      }
    }
  }
  const auto n = static_cast<Index>(s.size());
  return make_sparse(n, n, t);
}

SparseMatrix interval_mass(const FeSpace& s) {
  const auto& bp = s.interval()->breakpoints();
  Triplets t;
  for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
    const double h = bp[e + 1] - bp[e];
    const Index d[2] = {s.dof(static_cast<Index>(e)), s.dof(static_cast<Index>(e + 1))};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        if (d[i] >= 0 && d[j] >= 0) t.emplace_back(d[i], d[j], h * (i == j ? 2.0 : 1.0) / 6.0);
      }
    }
  }
  const auto n = static_cast<Index>(s.size());
  return make_sparse(n, n, t);
}

bool is_uniform(const IntervalMesh& mesh, double rel_tol) {
  const double h = mesh.length() / static_cast<double>(mesh.num_elements());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    if (std::abs(mesh.element_length(e) - h) > rel_tol * h * 1e3) return false;
  }
  return true;
}

FractionalNormOracle::FractionalNormOracle(IntervalMeshPtr carrier, bool zero_ends)
    : carrier_(std::move(carrier)), zero_ends_(zero_ends), space_(p1_space(carrier_, zero_ends)) {
  K_ = interval_stiffness(space_);
  M_ = interval_mass(space_);
  const auto n = static_cast<Eigen::Index>(space_.size());
  if (is_uniform(*carrier_)) {
    const auto N = static_cast<Eigen::Index>(carrier_->num_elements());
    const double h = carrier_->length() / static_cast<double>(N);
    lambda_.resize(n);
    psi_.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index mode = zero_ends_ ? k + 1 : k;
      const double theta = std::numbers::pi * static_cast<double>(mode) / static_cast<double>(N);
      lambda_[k] = 6.0 / (h * h) * (1.0 - std::cos(theta)) / (2.0 + std::cos(theta));
      for (Eigen::Index j = 0; j < n; ++j) {
        const double node = static_cast<double>(zero_ends_ ? j + 1 : j);
        psi_(j, k) = zero_ends_ ? std::sin(theta * node) : std::cos(theta * node);
      }
      const double nrm = std::sqrt(psi_.col(k).dot(M_ * psi_.col(k)));
      psi_.col(k) /= nrm;
    }
  } else {
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es{DenseMatrix(K_), DenseMatrix(M_)};
    if (es.info() != Eigen::Success) throw LinalgError("fractional oracle: eigensolver failed");
    lambda_ = es.eigenvalues();
    psi_ = es.eigenvectors();
  }
  lambda_ = lambda_.cwiseMax(0.0);
}

Vector FractionalNormOracle::dual_weights() const {
  Vector w(lambda_.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w[i] = zero_ends_ ? 1.0 / std::sqrt(lambda_[i]) : 1.0 / std::sqrt(1.0 + lambda_[i]);
  }
  return w;
}

double FractionalNormOracle::norm(const Vector& coeffs) const {
  const Vector c = psi_.transpose() * (M_ * coeffs);
  double s = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    s += (zero_ends_ ? std::sqrt(lambda_[i]) : std::sqrt(1.0 + lambda_[i])) * c[i] * c[i];
  }
  return std::sqrt(s);
}

double FractionalNormOracle::dual_norm(const Vector& functional) const {
  const Vector c = psi_.transpose() * functional;
  return std::sqrt(c.cwiseAbs2().dot(dual_weights()));
}

DenseMatrix FractionalNormOracle::dual_gram() const {
  return psi_ * dual_weights().asDiagonal() * psi_.transpose();
}

SparseMatrix FractionalNormOracle::pairing(const FeSpace& p0) const {
  if (!p0.on_interval() || p0.kind() != SpaceKind::P0Discontinuous) throw SpaceError("pairing needs an interval P0 space");
  const IntervalMesh& coarse = *p0.interval();
  const auto& bp = carrier_->breakpoints();
  const double tol = 1e-12 * std::max(1.0, coarse.length());
  Triplets t;
  for (std::size_t c = 0; c + 1 < bp.size(); ++c) {
    const std::size_t e = coarse.locate(0.5 * (bp[c] + bp[c + 1]));
    if (bp[c] < coarse.breakpoints()[e] - tol || bp[c + 1] > coarse.breakpoints()[e + 1] + tol) {
      throw SpaceError("carrier is not a refinement of the P0 mesh");
    }
    const double half = 0.5 * (bp[c + 1] - bp[c]);
    for (std::size_t node : {c, c + 1}) {
      const Index d = space_.dof(static_cast<Index>(node));
      if (d >= 0) t.emplace_back(d, static_cast<Index>(e), half);
    }
  }
  return make_sparse(static_cast<Index>(space_.size()), static_cast<Index>(p0.size()), t);
}

DenseMatrix FractionalNormOracle::p0_gram(const FeSpace& p0) const {
  const SparseMatrix T = pairing(p0);
  const DenseMatrix W = psi_.transpose() * T;
  DenseMatrix G = W.transpose() * dual_weights().asDiagonal() * W;
  return 0.5 * (G + G.transpose());
}

double FractionalNormOracle::p0_dual_norm(const FeSpace& p0, const Vector& coeffs) const {
  return dual_norm(pairing(p0) * coeffs);
}

Vector normalize_perturbation(const Vector& p_raw, double tau, const std::function<double(const Vector&)>& norm) {
  if (tau < 0.0) throw std::invalid_argument("perturbation size must be nonnegative");
  const double n = norm(p_raw);
  if (!(n > 0.0)) throw std::invalid_argument("cannot normalise a perturbation of zero norm");
  return (tau / n) * p_raw;
}

LinearOperator block_diagonal(std::vector<LinearOperator> blocks) {
  LinearOperator o;
  std::vector<Eigen::Index> off{0};
  for (const auto& b : blocks) off.push_back(off.back() + b.rows);
  o.rows = o.cols = off.back();
  o.symmetric = o.positive_definite = true;
  for (const auto& b : blocks) {
    o.symmetric = o.symmetric && b.symmetric;
    o.positive_definite = o.positive_definite && b.positive_definite;
  }
  o.apply = [blocks = std::move(blocks), off](const Vector& x, Vector& y) {
    y.resize(off.back());
    Vector yb;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      blocks[k].apply(x.segment(off[k], off[k + 1] - off[k]), yb);
      y.segment(off[k], off[k + 1] - off[k]) = yb;
    }
  };
  return o;
}

}  // namespace lsfem
