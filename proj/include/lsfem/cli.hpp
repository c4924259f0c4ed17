#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lsfem/problems.hpp"

namespace lsfem {

/// Batch run description. The config file is flat `key = value` text:
///
///   command   solve | convergence | perturb | infsup
///   problem   cauchy | wave | heat
///   case      i | ii (cauchy), a | b (heat); ignored for wave
///   levels    a:b (inclusive) or a comma list
///   eps       comma list of zero | tau | tau_plus_h | <number>
///   tau       comma list of perturbation sizes
///   perturb   none | random | random_centered | fourier:<m> | constant | random_p1
///   seed      unsigned integer
///   tol       PCG tolerance
///   maxit     PCG iteration cap (-1: 10 n)
///   solver    spd | mixed
///   infsup    cauchy_b1 | trace | wave | heat_tensor
///   truth_extra  extra truth refinements for infsup
///   out       output CSV path (empty: stdout)
///
/// `#` starts a comment; blank lines are ignored; unknown keys are errors.
struct RunConfig {
  std::string command = "convergence";
  ProblemKind problem = ProblemKind::Cauchy;
  std::string variant = "ii";
  std::vector<int> levels{0, 1, 2, 3};
  std::vector<EpsStrategy> eps{EpsStrategy{}};
  std::vector<double> tau{0.0};
  std::string perturb = "none";
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int maxit = -1;
  std::string solver = "spd";
  std::string infsup = "cauchy_b1";
  int truth_extra = 2;
  std::string out;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_string(ProblemKind k);
ProblemKind parse_problem(const std::string& text);
std::vector<int> parse_levels(const std::string& text);

std::string to_config_text(const RunConfig& c);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
void save_config(const RunConfig& c, const std::string& path);
bool operator==(const RunConfig& a, const RunConfig& b);

/// One solve of a configured problem.
struct RunRow {
  int level = 0;
  double h = 0.0;
  std::size_t dofs = 0;
  std::string eps_strategy;
  double eps = 0.0;
  double tau = 0.0;
  std::string perturbation;
  std::map<std::string, double> metrics;
  double estimator = 0.0;
  double reg_norm = 0.0;
  int iterations = 0;
};

RunRow run_single(const RunConfig& c, int level, const EpsStrategy& eps, double tau);

/// CSV writers. Rows are ordered by the config lists (eps, tau, level).
void cmd_solve(const RunConfig& c, std::ostream& os);
void cmd_convergence(const RunConfig& c, std::ostream& os);
void cmd_perturbation_study(const RunConfig& c, std::ostream& os);
void cmd_infsup(const RunConfig& c, std::ostream& os);
/// Reads a CSV produced by this tool and writes a matplotlib script.
void cmd_plot(const std::string& csv_path, std::ostream& os);

/// Dispatches on c.command; writes to c.out or `fallback`.
void run_command(const RunConfig& c, std::ostream& fallback);

/// "%.11e" formatting used in all CSV output.
std::string format_number(double v);

}  // namespace lsfem
