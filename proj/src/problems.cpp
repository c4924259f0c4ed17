#include "lsfem/problems.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace lsfem {

namespace {

constexpr double kPi = std::numbers::pi;

const Box kUnit{0.0, 1.0, 0.0, 1.0};
const Box kWaveWindow{0.0, 1.0, 0.5, 0.75};
const Box kHeatWindow{0.0, 1.0, 0.25, 0.75};
const Box kHeatInterior{0.125, 0.875, 0.125, 0.875};
const Box kHeatLate{0.125, 1.0, 0.0, 1.0};
const Box kCauchyDomain{0.0, kPi, 0.0, 1.0};

template <class T>
std::shared_ptr<const void> own(std::shared_ptr<T> p) {
  return std::static_pointer_cast<const void>(std::shared_ptr<const T>(std::move(p)));
}

LinearOperator h1_preconditioner(const FeSpace& finest, std::vector<std::shared_ptr<const void>>& owners) {
  auto ml = std::make_shared<MultilevelH1>(p1_hierarchy(finest));
  LinearOperator op = ml->op();
  owners.push_back(own(ml));
  return op;
}

std::vector<MeshPtr> hierarchy_for(ProblemKind kind, int finest) {
  MeshPtr initial = kind == ProblemKind::Cauchy ? make_cauchy_initial() : make_spacetime_initial(kUnit);
  return make_hierarchy(initial, finest);
}

void check_level(ProblemKind kind, int level) {
  if (level < min_level(kind)) {
    throw std::invalid_argument("level " + std::to_string(level) + " does not resolve the observation window (minimum " +
                                std::to_string(min_level(kind)) + ")");
  }
}

Vector random_values(std::size_t n, const Perturbation& p) {
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> dist(p.centered ? -0.5 : 0.0, p.centered ? 0.5 : 1.0);
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  return v;
}

}  // namespace

std::string to_string(PerturbKind k) {
  switch (k) {
    case PerturbKind::None: return "none";
    case PerturbKind::RandomPwConst: return "random";
    case PerturbKind::FourierMode: return "fourier";
    case PerturbKind::Constant: return "constant";
    case PerturbKind::RandomP1: return "random_p1";
  }
  return "none";
}

Perturbation parse_perturbation(const std::string& text) {
  Perturbation p;
  if (text.empty() || text == "none") return p;
  if (text == "random") {
    p.kind = PerturbKind::RandomPwConst;
  } else if (text == "random_centered") {
    p.kind = PerturbKind::RandomPwConst;
    p.centered = true;
  } else if (text == "constant") {
    p.kind = PerturbKind::Constant;
  } else if (text == "random_p1") {
    p.kind = PerturbKind::RandomP1;
  } else if (text.rfind("fourier", 0) == 0) {
    p.kind = PerturbKind::FourierMode;
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("fourier perturbation needs a mode, e.g. fourier:6");
    p.mode = std::stoi(text.substr(colon + 1));
    if (p.mode < 1) throw std::invalid_argument("fourier mode must be positive");
  } else {
    throw std::invalid_argument("unknown perturbation '" + text + "'");
  }
  return p;
}

std::string perturbation_label(const Perturbation& p) {
  switch (p.kind) {
    case PerturbKind::FourierMode: return "fourier:" + std::to_string(p.mode);
    case PerturbKind::RandomPwConst: return p.centered ? "random_centered" : "random";
    default: return to_string(p.kind);
  }
}

int min_level(ProblemKind kind) { return kind == ProblemKind::Cauchy ? 0 : 3; }

double fourier_neumann(int m, double x) { return -std::sqrt(2.0 * m / kPi) * std::sin(m * x); }

std::pair<double, double> error_and_norm(const FeSpace& space, const Vector& coeffs, const ExactSolution& u,
                                         const Box& box, NormKind norm) {
  const Mesh2D& mesh = *space.mesh();
  const auto& rule = triangle_rule_deg4();
  double err = 0.0, ref = 0.0;
  for (Index t = 0; t < static_cast<Index>(mesh.num_triangles()); ++t) {
    const auto c = mesh.corners(t);
    const auto pieces = fan(clip_to_box(c, box));
    if (pieces.empty()) continue;
    const Point gh = norm == NormKind::L2 ? Point{} : space.gradient(coeffs, t);
    for (const auto& piece : pieces) {
      const double area =
          0.5 * std::abs((piece[1].x - piece[0].x) * (piece[2].y - piece[0].y) -
                         (piece[1].y - piece[0].y) * (piece[2].x - piece[0].x));
      if (area == 0.0) continue;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Point x = map_point(piece, rule.points[q]);
        const double w = area * rule.weights[q];
        const double uv = u.value(x);
        const double e = uv - space.evaluate(coeffs, t, barycentric(c, x));
        err += w * e * e;
        ref += w * uv * uv;
        if (norm != NormKind::L2) {
          const Point g = u.gradient(x);
          const double ey = g.y - gh.y;
          err += w * ey * ey;
          ref += w * g.y * g.y;
          if (norm == NormKind::H1) {
            const double ex = g.x - gh.x;
            err += w * ex * ex;
            ref += w * g.x * g.x;
          }
        }
      }
    }
  }
  return {std::sqrt(err), std::sqrt(ref)};
}

std::map<std::string, double> ProblemInstance::metrics(const Vector& u) const {
  std::map<std::string, double> out;
  auto rel = [](std::pair<double, double> p) { return p.second > 0.0 ? p.first / p.second : p.first; };
  const FeSpace& s = trial.factor(0);
  const Vector u1 = trial.block(u, 0);
  switch (setup.kind) {
    case ProblemKind::Cauchy:
      out["l2"] = rel(error_and_norm(s, u1, exact, kCauchyDomain, NormKind::L2));
      out["h1"] = rel(error_and_norm(s, u1, exact, kCauchyDomain, NormKind::H1));
      break;
    case ProblemKind::Wave:
      out["l2"] = rel(error_and_norm(s, u1, exact, kUnit, NormKind::L2));
      out["h1"] = rel(error_and_norm(s, u1, exact, kUnit, NormKind::H1));
      break;
    case ProblemKind::Heat:
      out["l2"] = rel(error_and_norm(s, u1, exact, kUnit, NormKind::L2));
      out["h1_window"] = rel(error_and_norm(s, u1, exact, kHeatInterior, NormKind::H1SecondCoordinate));
      out["h1_late"] = rel(error_and_norm(s, u1, exact, kHeatLate, NormKind::H1SecondCoordinate));
      break;
  }
  return out;
}

Vector ProblemInstance::interpolant() const {
  Vector u = Vector::Zero(static_cast<Eigen::Index>(trial.size()));
  const auto& P = mesh->vertices();
  for (std::size_t k = 0; k < trial.factors().size(); ++k) {
    const FeSpace& s = trial.factor(k);
    Vector full(static_cast<Eigen::Index>(P.size()));
    for (std::size_t v = 0; v < P.size(); ++v) {
      full[static_cast<Eigen::Index>(v)] = k == 0 ? exact.value(P[v]) : -exact.gradient(P[v]).y;
    }
    trial.set_block(u, k, s.restrict_values(full));
  }
  return u;
}

Vector random_sigma_perturbation(const FeSpace& sigma_p0, const Perturbation& p) {
  const Vector raw = random_values(sigma_p0.size(), p);
  if (p.tau == 0.0) return Vector::Zero(raw.size());
  const FractionalNormOracle oracle(red_refine_interval(red_refine_interval(sigma_p0.interval())), true);
  return normalize_perturbation(raw, p.tau, [&](const Vector& v) { return oracle.p0_dual_norm(sigma_p0, v); });
}

Vector cauchy_y1_load(const FeSpace& y1, const Perturbation& p) {
  const double tau = p.tau;
  const int m = p.mode;
  Field fN = [](const Point& q) { return -std::sin(q.x); };
  if (p.kind == PerturbKind::FourierMode) {
    fN = [tau, m](const Point& q) { return -std::sin(q.x) + tau * fourier_neumann(m, q.x); };
  }
  return assemble_load([](const Point&) { return -2.0 / 9.0; }, y1) + assemble_boundary_load(fN, BoundaryTag::Sigma, y1);
}

ProblemInstance cauchy_problem(int level, const std::string& variant, const EpsStrategy& eps, const Perturbation& p) {
  if (variant != "i" && variant != "ii") throw std::invalid_argument("Cauchy case must be i or ii");
  if (p.kind != PerturbKind::None && p.kind != PerturbKind::RandomPwConst && p.kind != PerturbKind::FourierMode) {
    throw std::invalid_argument("Cauchy data accepts random or fourier perturbations of f_N");
  }
  check_level(ProblemKind::Cauchy, level);
  ProblemInstance inst;
  inst.setup = {ProblemKind::Cauchy, variant, level, eps, p};
  inst.meshes = hierarchy_for(ProblemKind::Cauchy, level + 2);
  inst.mesh = inst.meshes[static_cast<std::size_t>(level)];
  inst.h = inst.mesh->max_diameter();
  inst.eps = epsilon_strategy(eps, p.tau, inst.h);
  inst.exact = {[](const Point& q) { return std::sin(q.x) * std::sinh(q.y) + q.x * q.x / 9.0; },
                [](const Point& q) {
                  return Point{std::cos(q.x) * std::sinh(q.y) + 2.0 * q.x / 9.0, std::sin(q.x) * std::cosh(q.y)};
                }};

  const FeSpace X = p1_space(inst.mesh);
  inst.trial = ProductSpace({X});
  const MeshPtr fine = inst.meshes.back();
  inst.test = p1_space(fine, {BoundaryTag::SigmaComplement});
  inst.trace_test = p0_space(boundary_trace_mesh(*fine, BoundaryTag::Sigma));

  LsProblem& pr = inst.problem;
  pr.n = static_cast<Eigen::Index>(X.size());

  // Y1 block: int grad z . grad v against f_I(v) + int_Sigma f_N v.
  DualBlock b1;
  b1.name = "Y1";
  b1.B = assemble({FormKind::H1Stiffness}, X, inst.test);
  b1.g = cauchy_y1_load(inst.test, p);
  if (p.kind == PerturbKind::RandomPwConst) {
    inst.perturbation = random_sigma_perturbation(inst.trace_test, p);
    const SparseMatrix T = assemble({FormKind::TraceMass, BoundaryTag::Sigma}, inst.test, inst.trace_test);
    b1.g += T.transpose() * inst.perturbation;
  }
  b1.G = h1_preconditioner(inst.test, pr.owners);
  pr.dual_blocks.push_back(std::move(b1));

  // Y2 block: trace pairing against f_D.
  DualBlock b2;
  b2.name = "Y2";
  b2.B = assemble({FormKind::TraceMass, BoundaryTag::Sigma}, X, inst.trace_test);
  b2.g = assemble_interval_load([](double s) { return s * s / 9.0; }, inst.trace_test);
  auto g2 = std::make_shared<MultilevelHminusHalf>(
      interval_chain(boundary_trace_mesh(*inst.meshes.front(), BoundaryTag::Sigma), inst.trace_test.interval()));
  b2.G = g2->op();
  pr.owners.push_back(own(g2));
  pr.dual_blocks.push_back(std::move(b2));

  pr.regularizer = Regularizer{assemble({variant == "i" ? FormKind::L2Mass : FormKind::H1Gram}, X, X), inst.eps};
  pr.preconditioner = h1_preconditioner(X, pr.owners);
  return inst;
}

ProblemInstance wave_problem(int level, const Perturbation& p) {
  if (p.kind != PerturbKind::None && p.kind != PerturbKind::Constant && p.kind != PerturbKind::RandomP1) {
    throw std::invalid_argument("wave data accepts constant or random_p1 perturbations of h");
  }
  check_level(ProblemKind::Wave, level);
  ProblemInstance inst;
  inst.setup = {ProblemKind::Wave, "", level, {}, p};
  inst.meshes = hierarchy_for(ProblemKind::Wave, level + 2);
  inst.mesh = inst.meshes[static_cast<std::size_t>(level)];
  inst.h = inst.mesh->max_diameter();
  inst.exact = {[](const Point& q) { return std::cos(kPi * q.x) * std::sin(kPi * q.y); },
                [](const Point& q) {
                  return Point{-kPi * std::sin(kPi * q.x) * std::sin(kPi * q.y),
                               kPi * std::cos(kPi * q.x) * std::cos(kPi * q.y)};
                }};

  const FeSpace X = p1_space(inst.mesh);
  inst.trial = ProductSpace({X});
  inst.test = p1_space(inst.meshes.back(),
                       {BoundaryTag::LateralBoundary, BoundaryTag::InitialTime, BoundaryTag::FinalTime});
  LsProblem& pr = inst.problem;
  pr.n = static_cast<Eigen::Index>(X.size());

  DualBlock b;
  b.name = "Y";
  b.B = assemble({FormKind::WaveForm}, X, inst.test);
  b.g = Vector::Zero(static_cast<Eigen::Index>(inst.test.size()));
  b.G = h1_preconditioner(inst.test, pr.owners);
  pr.dual_blocks.push_back(std::move(b));

  L2Block lateral;
  lateral.name = "lateral";
  lateral.Q = assemble({FormKind::TraceMass, BoundaryTag::LateralBoundary}, X, X);
  lateral.r = Vector::Zero(pr.n);
  pr.l2_blocks.push_back(std::move(lateral));

  const Form window{FormKind::WindowMass, BoundaryTag::Other, kWaveWindow};
  L2Block obs;
  obs.name = "window";
  obs.Q = assemble(window, X, X);
  Field hdata = inst.exact.value;
  if (p.kind == PerturbKind::Constant) {
    const double c = p.tau / std::sqrt(kWaveWindow.area());
    hdata = [u = inst.exact.value, c](const Point& q) { return u(q) + c; };
  }
  obs.r = assemble_load(hdata, X, &kWaveWindow);
  obs.hh = integrate_square(hdata, *inst.mesh, &kWaveWindow);
  if (p.kind == PerturbKind::RandomP1) {
    const Vector raw = random_values(X.size(), p);
    inst.perturbation = p.tau == 0.0 ? Vector(Vector::Zero(raw.size()))
                                     : normalize_perturbation(raw, p.tau, [&](const Vector& v) {
                                         return std::sqrt(v.dot(obs.Q * v));
                                       });
    const Vector Mp = obs.Q * inst.perturbation;
    obs.hh += 2.0 * inst.perturbation.dot(obs.r) + inst.perturbation.dot(Mp);
    obs.r += Mp;
  }
  pr.l2_blocks.push_back(std::move(obs));
  pr.preconditioner = h1_preconditioner(X, pr.owners);
  return inst;
}

ProblemInstance heat_fosls_problem(int level, const std::string& variant, const EpsStrategy& eps,
                                   const Perturbation& p) {
  if (variant != "a" && variant != "b") throw std::invalid_argument("heat case must be a or b");
  if (p.kind != PerturbKind::None && p.kind != PerturbKind::RandomPwConst) {
    throw std::invalid_argument("heat data accepts random perturbations of g");
  }
  check_level(ProblemKind::Heat, level);
  ProblemInstance inst;
  inst.setup = {ProblemKind::Heat, variant, level, eps, p};
  inst.meshes = hierarchy_for(ProblemKind::Heat, level);
  inst.mesh = inst.meshes.back();
  inst.h = inst.mesh->max_diameter();
  inst.eps = variant == "a" ? epsilon_strategy(eps, p.tau, inst.h) : 0.0;
  inst.exact = {[](const Point& q) { return (q.x * q.x * q.x + 1.0) * std::sin(kPi * q.y); },
                [](const Point& q) {
                  return Point{3.0 * q.x * q.x * std::sin(kPi * q.y), kPi * (q.x * q.x * q.x + 1.0) * std::cos(kPi * q.y)};
                }};

  std::set<BoundaryTag> tags;
  if (variant == "b") tags.insert(BoundaryTag::LateralBoundary);
  const FeSpace u1 = p1_space(inst.mesh, tags);
  const FeSpace u2 = p1_space(inst.mesh);
  inst.trial = ProductSpace({u1, u2});
  LsProblem& pr = inst.problem;
  pr.n = static_cast<Eigen::Index>(inst.trial.size());

  L2Block flux;
  flux.name = "flux";
  flux.Q = assemble({FormKind::FoslsFlux}, inst.trial);
  flux.r = Vector::Zero(pr.n);
  pr.l2_blocks.push_back(std::move(flux));

  const Field f = [](const Point& q) {
    return (3.0 * q.x * q.x + kPi * kPi * (q.x * q.x * q.x + 1.0)) * std::sin(kPi * q.y);
  };
  L2Block div;
  div.name = "div";
  div.Q = assemble({FormKind::FoslsDiv}, inst.trial);
  div.r = assemble_load({FormKind::FoslsDiv}, f, inst.trial);
  div.hh = integrate_square(f, *inst.mesh);
  pr.l2_blocks.push_back(std::move(div));

  const Form window{FormKind::WindowMass, BoundaryTag::Other, kHeatWindow};
  L2Block obs;
  obs.name = "window";
  obs.Q = assemble(window, inst.trial);
  obs.r = assemble_load(window, inst.exact.value, inst.trial);
  obs.hh = integrate_square(inst.exact.value, *inst.mesh, &kHeatWindow);
  if (p.kind == PerturbKind::RandomPwConst) {
    const FeSpace q0 = p0_space(inst.mesh);
    const auto inside = window_membership(*inst.mesh, kHeatWindow);
    Vector raw = random_values(q0.size(), p);
    for (Eigen::Index t = 0; t < raw.size(); ++t) {
      if (!inside[static_cast<std::size_t>(t)]) raw[t] = 0.0;
    }
    const SparseMatrix Mq = assemble(window, q0, q0);
    inst.perturbation = p.tau == 0.0 ? Vector(Vector::Zero(raw.size()))
                                     : normalize_perturbation(raw, p.tau, [&](const Vector& v) {
                                         return std::sqrt(v.dot(Mq * v));
                                       });
    const SparseMatrix cross = assemble(window, q0, u1);
    const Vector gq = assemble_load(inst.exact.value, q0, &kHeatWindow);
    const Vector rp = cross * inst.perturbation;
    obs.r.head(static_cast<Eigen::Index>(u1.size())) += rp;
    obs.hh += 2.0 * inst.perturbation.dot(gq) + inst.perturbation.dot(Mq * inst.perturbation);
  }
  pr.l2_blocks.push_back(std::move(obs));

  if (variant == "a") pr.regularizer = Regularizer{assemble({FormKind::L2Mass}, inst.trial), inst.eps};
  LinearOperator p1 = h1_preconditioner(u1, pr.owners);
  LinearOperator p2 = h1_preconditioner(u2, pr.owners);
  pr.preconditioner = block_diagonal({p1, p2});
  return inst;
}

ProblemInstance make_problem(const ProblemSetup& s) {
  switch (s.kind) {
    case ProblemKind::Cauchy: return cauchy_problem(s.level, s.variant, s.eps, s.perturbation);
    case ProblemKind::Wave: return wave_problem(s.level, s.perturbation);
    case ProblemKind::Heat: return heat_fosls_problem(s.level, s.variant, s.eps, s.perturbation);
  }
  throw std::invalid_argument("unknown problem");
}

}  // namespace lsfem
