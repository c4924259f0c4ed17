#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "lsfem/cli.hpp"

namespace {

struct Flags {
  std::string config;
  std::string problem;
  std::string variant;
  std::string levels;
  std::string eps;
  std::string tau;
  std::string perturb;
  std::string infsup;
  std::string solver;
  std::string out;
  long long seed = -1;
  int truth_extra = -1;
};

void add_run_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Config file (flags given here override it)");
  sub->add_option("--problem", f.problem, "cauchy | wave | heat");
  sub->add_option("--case", f.variant, "i | ii (cauchy), a | b (heat)");
  sub->add_option("--levels", f.levels, "Level range a:b or list a,b,c");
  sub->add_option("--eps", f.eps, "Comma list of zero | tau | tau_plus_h | <number>");
  sub->add_option("--tau", f.tau, "Comma list of perturbation sizes");
  sub->add_option("--perturb", f.perturb, "none | random | random_centered | fourier:<m> | constant | random_p1");
  sub->add_option("--seed", f.seed, "Random seed");
  sub->add_option("--solver", f.solver, "spd | mixed");
  sub->add_option("--infsup", f.infsup, "cauchy_b1 | trace | wave | heat_tensor");
  sub->add_option("--truth-extra", f.truth_extra, "Extra truth refinements for infsup");
  sub->add_option("--out", f.out, "Output CSV (default stdout)");
}

lsfem::RunConfig make_config(const std::string& command, const Flags& f) {
  lsfem::RunConfig c = f.config.empty() ? lsfem::RunConfig{} : lsfem::load_config(f.config);
  std::string text = lsfem::to_config_text(c);
  auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) text += std::string(key) + " = " + v + "\n";
  };
  set("command", command);
  set("problem", f.problem);
  set("case", f.variant);
  set("levels", f.levels);
  set("eps", f.eps);
  set("tau", f.tau);
  set("perturb", f.perturb);
  set("solver", f.solver);
  set("infsup", f.infsup);
  set("out", f.out);
  if (f.seed >= 0) set("seed", std::to_string(f.seed));
  if (f.truth_extra >= 0) set("truth_extra", std::to_string(f.truth_extra));
  return lsfem::parse_config_text(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularised least-squares finite element experiments"};
  app.require_subcommand(1);
  Flags flags;
  std::string csv, script_out;
  for (const char* name : {"solve", "convergence", "perturb", "infsup"}) {
    add_run_flags(app.add_subcommand(name, std::string("Run the ") + name + " command"), flags);
  }
  CLI::App* plot = app.add_subcommand("plot", "Emit a matplotlib script for a CSV");
  plot->add_option("csv", csv, "CSV written by this tool")->required();
  plot->add_option("--out", script_out, "Script path (default stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    CLI::App* sub = app.get_subcommands().front();
    if (sub == plot) {
      if (script_out.empty()) {
        lsfem::cmd_plot(csv, std::cout);
      } else {
        std::ofstream out(script_out);
        if (!out) throw lsfem::ConfigError("cannot write '" + script_out + "'");
        lsfem::cmd_plot(csv, out);
      }
      return 0;
    }
    lsfem::run_command(make_config(sub->get_name(), flags), std::cout);
  } catch (const std::exception& e) {
    std::cerr << "lsfem: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
