#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lsfem/cli.hpp"

using namespace lsfem;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lsfem_test_" + name);
}

RunConfig small_cauchy() {
  RunConfig c;
  c.problem = ProblemKind::Cauchy;
  c.levels = {1, 2, 3};
  c.eps = {parse_eps("zero"), parse_eps("tau_plus_h")};
  return c;
}

}  // namespace

TEST_CASE("config text round-trips") {
  RunConfig c;
  c.command = "perturb";
  c.problem = ProblemKind::Heat;
  c.variant = "b";
  c.levels = {3, 5, 7};
  c.eps = {parse_eps("tau"), parse_eps("0.5")};
  c.tau = {0.0, 0.01, 0.1};
  c.perturb = "random_centered";
  c.seed = 42;
  c.infsup = "trace";
  c.truth_extra = 1;
  c.out = "out dir/x.csv";
  const RunConfig back = parse_config_text(to_config_text(c));
  CHECK(back == c);
  CHECK(to_config_text(back) == to_config_text(c));

  const auto path = temp_file("cfg.cfg");
  save_config(c, path.string());
  CHECK(load_config(path.string()) == c);
  std::filesystem::remove(path);
}

TEST_CASE("config grammar") {
  const RunConfig c = parse_config_text("# comment\n\nproblem = wave\nlevels = 2:4  # trailing\n");
  CHECK(c.problem == ProblemKind::Wave);
  CHECK(c.levels == std::vector<int>{2, 3, 4});
  CHECK(parse_levels("1,3,5") == std::vector<int>{1, 3, 5});
  CHECK_THROWS_AS(parse_config_text("colour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("problem\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("seed = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("solver = lu\n"), ConfigError);
  CHECK_THROWS_AS(parse_levels("4:2"), ConfigError);
  CHECK_THROWS_AS(parse_problem("stokes"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/lsfem.cfg"), ConfigError);
}

TEST_CASE("numbers carry 12 significant digits") {
  CHECK(format_number(0.1) == "1.00000000000e-01");
  CHECK(format_number(-12345.0) == "-1.23450000000e+04");
}

TEST_CASE("convergence CSV is deterministic and carries slope rows") {
  std::ostringstream a, b;
  cmd_convergence(small_cauchy(), a);
  cmd_convergence(small_cauchy(), b);
  CHECK(a.str() == b.str());
  std::istringstream in(a.str());
  std::string header, line;
  std::getline(in, header);
  CHECK(header.rfind("schema,problem,case,eps_strategy,perturbation,seed,tau,row,level,h,dofs,eps,", 0) == 0);
  int data = 0, slope = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind("lsfem.run.v1,cauchy,ii,", 0) == 0);
    if (line.find(",data,") != std::string::npos) ++data;
    if (line.find(",slope,") != std::string::npos) ++slope;
  }
  CHECK(data == 6);
  CHECK(slope == 2);
}

TEST_CASE("perturbation study requires a perturbation and sweeps tau") {
  RunConfig c = small_cauchy();
  CHECK_THROWS_AS(cmd_perturbation_study(c, std::cout), ConfigError);
  c.levels = {2};
  c.perturb = "random";
  c.tau = {0.0, 0.1};
  std::ostringstream os;
  cmd_perturbation_study(c, os);
  std::istringstream in(os.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 1 + 2 * 2);
}

TEST_CASE("infsup CSV starts with the identity row") {
  RunConfig c;
  c.command = "infsup";
  c.infsup = "trace";
  c.levels = {0, 1};
  std::ostringstream os;
  cmd_infsup(c, os);
  std::istringstream in(os.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header.rfind("schema,name,row,level,trial_dofs,truth_extra,rho", 0) == 0);
  CHECK(first.find(",identity,") != std::string::npos);
  CHECK(first.find(",1.00000000000e+00,") != std::string::npos);
  c.infsup = "stokes";
  CHECK_THROWS_AS(cmd_infsup(c, os), ConfigError);
}

TEST_CASE("plot scripts") {
  const auto empty = temp_file("empty.csv");
  std::ofstream(empty.string()).close();
  std::ostringstream sink;
  CHECK_THROWS_AS(cmd_plot(empty.string(), sink), ConfigError);
  CHECK_THROWS_AS(cmd_plot(temp_file("missing.csv").string(), sink), ConfigError);

  const auto csv = temp_file("conv.csv");
  RunConfig c = small_cauchy();
  c.command = "convergence";
  c.out = csv.string();
  run_command(c, sink);
  std::ostringstream a, b;
  cmd_plot(csv.string(), a);
  cmd_plot(csv.string(), b);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("matplotlib") != std::string::npos);
  CHECK(a.str().find("dofs") != std::string::npos);
  CHECK(a.str().find("l2") != std::string::npos);

  const auto bad = temp_file("bad.csv");
  std::ofstream(bad.string()) << "a,b\n1,2\n";
  CHECK_THROWS_AS(cmd_plot(bad.string(), sink), ConfigError);
  for (const auto& p : {empty, csv, bad}) std::filesystem::remove(p);
}

TEST_CASE("unknown commands are rejected") {
  RunConfig c;
  c.command = "dance";
  CHECK_THROWS_AS(run_command(c, std::cout), ConfigError);
}

TEST_CASE("shipped experiment configs parse and run on a coarse level") {
  const std::filesystem::path dir = std::filesystem::path(LSFEM_SOURCE_DIR) / "experiments";
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".cfg") continue;
    ++n;
    CAPTURE(entry.path().string());
    RunConfig c = load_config(entry.path().string());
    CHECK(!c.out.empty());
    c.levels = {min_level(c.problem) + 1};
    c.out.clear();
    std::ostringstream os;
    CHECK_NOTHROW(run_command(c, os));
    CHECK(os.str().find("lsfem.run.v1") != std::string::npos);
  }
  CHECK(n == 14);
}
