#pragma once

#include <cstdint>
#include <map>

#include "lsfem/assembly.hpp"
#include "lsfem/precond.hpp"
#include "lsfem/solver.hpp"

namespace lsfem {

enum class ProblemKind { Cauchy, Wave, Heat };

enum class PerturbKind {
  None,
  RandomPwConst,  // Cauchy: P0 on the fine Sigma edges, added to f_N; heat: P0 on the trial mesh, added to g
  FourierMode,    // Cauchy: tau * f_N^(m) added to f_N
  Constant,       // wave: constant added to h
  RandomP1,       // wave: random trial-space function added to h
};

struct Perturbation {
  PerturbKind kind = PerturbKind::None;
  int mode = 1;
  double tau = 0.0;
  std::uint64_t seed = 1;
  /// Random values in [-1/2, 1/2] instead of [0, 1].
  bool centered = false;
};

std::string to_string(PerturbKind k);
/// "none", "random", "random_centered", "fourier:m", "constant", "random_p1".
Perturbation parse_perturbation(const std::string& text);
std::string perturbation_label(const Perturbation& p);

struct ProblemSetup {
  ProblemKind kind = ProblemKind::Cauchy;
  /// Cauchy: "i" or "ii"; heat: "a" or "b"; ignored for the wave problem.
  std::string variant = "ii";
  int level = 2;
  EpsStrategy eps{};
  Perturbation perturbation{};
};

/// Smooth exact solution with its gradient (x, y) = (first, second coordinate).
struct ExactSolution {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
};

enum class NormKind { L2, H1, H1SecondCoordinate };

/// |u - u_h| and |u| over `box`, clipping triangles and using a degree-4 rule.
std::pair<double, double> error_and_norm(const FeSpace& space, const Vector& coeffs, const ExactSolution& u,
                                         const Box& box, NormKind norm);

struct ProblemInstance {
  ProblemSetup setup;
  std::vector<MeshPtr> meshes;  // levels 0 .. level + 2 (0 .. level for the heat problem)
  MeshPtr mesh;                 // trial mesh
  double h = 0.0;               // maximal triangle diameter of the trial mesh
  double eps = 0.0;
  ProductSpace trial;           // one factor (Cauchy, wave) or (u1, u2) for the heat problem
  FeSpace test;                 // Y1 (Cauchy) or Y (wave); empty for the heat problem
  FeSpace trace_test;           // Y2 (Cauchy)
  ExactSolution exact;
  LsProblem problem;
  /// Applied perturbation: P0/P1 coefficients, or empty for closed-form ones.
  Vector perturbation;

  std::size_t dofs() const { return trial.size(); }
  /// Named relative errors of a trial vector.
  std::map<std::string, double> metrics(const Vector& u) const;
  /// Nodal interpolant of the exact solution (u2 = -u_x for the heat problem).
  Vector interpolant() const;
};

ProblemInstance cauchy_problem(int level, const std::string& variant, const EpsStrategy& eps, const Perturbation& p = {});
ProblemInstance wave_problem(int level, const Perturbation& p = {});
ProblemInstance heat_fosls_problem(int level, const std::string& variant, const EpsStrategy& eps, const Perturbation& p = {});
ProblemInstance make_problem(const ProblemSetup& setup);

/// Lowest level at which the observation window is resolved.
int min_level(ProblemKind kind);

/// f_N^(m)(x) = -sqrt(2m/pi) sin(mx).
double fourier_neumann(int m, double x);

/// int f_I v + int_Sigma f_N v with the Fourier perturbation applied when given.
Vector cauchy_y1_load(const FeSpace& y1, const Perturbation& p = {});

/// Random P0 function on the fine Sigma partition normalised to tau in the
/// dual norm of the zero-end H^{1/2} oracle (carrier: two red refinements).
Vector random_sigma_perturbation(const FeSpace& sigma_p0, const Perturbation& p);

}  // namespace lsfem
