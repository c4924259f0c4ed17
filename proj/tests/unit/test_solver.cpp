#include <doctest.h>

#include <random>

#include "lsfem/problems.hpp"

using namespace lsfem;

namespace {

Vector random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

ProblemInstance instance(ProblemKind k, const std::string& variant, int level, const std::string& eps = "zero") {
  ProblemSetup s;
  s.kind = k;
  s.variant = variant;
  s.level = level;
  s.eps = parse_eps(eps);
  return make_problem(s);
}

}  // namespace

TEST_CASE("estimator squared is the sum of its parts") {
  for (auto [k, v, l] : {std::tuple{ProblemKind::Cauchy, "ii", 2}, std::tuple{ProblemKind::Wave, "", 3},
                         std::tuple{ProblemKind::Heat, "a", 3}}) {
    const ProblemInstance inst = instance(k, v, l, "0.05");
    const SolveReport r = solve_spd(inst.problem);
    double sum = 0.0;
    for (double p : r.dual_parts) sum += p;
    for (double p : r.l2_parts) sum += p;
    CHECK(r.estimator * r.estimator == doctest::Approx(sum).epsilon(1e-14));
    CHECK(residual_estimator(r) == doctest::Approx(r.estimator).epsilon(1e-15));
    const SolveReport e = evaluate(inst.problem, r.u);
    CHECK(e.estimator == doctest::Approx(r.estimator).epsilon(1e-14));
  }
}

TEST_CASE("consistent in-space data is reproduced") {
  ProblemInstance inst = instance(ProblemKind::Cauchy, "ii", 2);
  const Vector u = random_vector(inst.problem.n, 5);
  for (auto& b : inst.problem.dual_blocks) b.g = b.B * u;
  const SolveReport r = solve_spd(inst.problem, 1e-12);
  CHECK((r.u - u).norm() / u.norm() < 1e-9);
  CHECK(r.estimator < 1e-9);

  ProblemInstance heat = instance(ProblemKind::Heat, "a", 3);
  const Vector w = random_vector(heat.problem.n, 6);
  for (auto& b : heat.problem.l2_blocks) {
    b.r = b.Q * w;
    b.hh = w.dot(b.Q * w);
  }
  const SolveReport rh = solve_spd(heat.problem, 1e-12);
  CHECK((rh.u - w).norm() / w.norm() < 1e-8);
}

TEST_CASE("SPD and mixed formulations agree") {
  for (auto [k, v, l] : {std::tuple{ProblemKind::Cauchy, "ii", 1}, std::tuple{ProblemKind::Cauchy, "i", 1},
                         std::tuple{ProblemKind::Wave, "", 3}, std::tuple{ProblemKind::Heat, "a", 3},
                         std::tuple{ProblemKind::Heat, "b", 3}}) {
    const ProblemInstance inst = instance(k, v, l, "0.1");
    const SolveReport a = solve_spd(inst.problem, 1e-12);
    std::vector<Vector> lifted;
    const SolveReport b = solve_mixed(inst.problem, &lifted);
    CHECK((a.u - b.u).norm() / b.u.norm() < 1e-8);
    CHECK(lifted.size() == inst.problem.dual_blocks.size());
  }
}

TEST_CASE("mixed lifted residual is G applied to the residual") {
  const ProblemInstance inst = instance(ProblemKind::Cauchy, "ii", 1);
  std::vector<Vector> lifted;
  const SolveReport r = solve_mixed(inst.problem, &lifted);
  for (std::size_t k = 0; k < lifted.size(); ++k) {
    const auto& b = inst.problem.dual_blocks[k];
    const Vector v = b.G * Vector(b.g - b.B * r.u);
    CHECK((lifted[k] - v).norm() <= 1e-9 * std::max(1.0, v.norm()));
  }
}

TEST_CASE("injectivity and the dense normal matrix") {
  const ProblemInstance inst = instance(ProblemKind::Wave, "", 3);
  CHECK(is_injective(inst.problem));
  const DenseMatrix A = dense_spd_matrix(inst.problem);
  const DenseMatrix Aop = to_dense(inst.problem.spd_operator());
  CHECK((A - Aop).cwiseAbs().maxCoeff() < 1e-12 * A.cwiseAbs().maxCoeff());
}

TEST_CASE("epsilon strategies") {
  CHECK(epsilon_strategy(parse_eps("zero"), 0.1, 0.2) == 0.0);
  CHECK(epsilon_strategy(parse_eps("tau"), 0.1, 0.2) == 0.1);
  CHECK(epsilon_strategy(parse_eps("tau_plus_h"), 0.1, 0.2) == doctest::Approx(0.3));
  CHECK(epsilon_strategy(parse_eps("0.25"), 0.1, 0.2) == 0.25);
  CHECK(to_string(parse_eps("tau_plus_h")) == "tau_plus_h");
  CHECK(parse_eps(to_string(parse_eps("0.125"))).value == 0.125);
  CHECK_THROWS(parse_eps("bogus"));
  CHECK_THROWS(parse_eps("-1"));
  CHECK_THROWS(epsilon_strategy(parse_eps("tau"), -0.1, 0.2));
}
