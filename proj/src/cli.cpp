#include "lsfem/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "lsfem/infsup.hpp"

namespace lsfem {

namespace {

constexpr const char* kRunSchema = "lsfem.run.v1";
constexpr const char* kInfSupSchema = "lsfem.infsup.v1";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad number for '" + key + "': '" + v + "'");
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad integer for '" + key + "': '" + v + "'");
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    s += (i ? "," : "") + std::string(buf);
  }
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  if (quoted) throw ConfigError("unterminated quote in CSV line");
  out.push_back(cur);
  return out;
}

std::vector<std::string> metric_names(ProblemKind k) {
  switch (k) {
    case ProblemKind::Cauchy: return {"h1", "l2"};
    case ProblemKind::Wave: return {"h1", "l2"};
    case ProblemKind::Heat: return {"h1_late", "h1_window", "l2"};
  }
  return {};
}

void write_run_header(const RunConfig& c, std::ostream& os) {
  os << "schema,problem,case,eps_strategy,perturbation,seed,tau,row,level,h,dofs,eps";
  for (const auto& m : metric_names(c.problem)) os << ',' << m;
  os << ",estimator,reg_norm,iterations\n";
}

void write_run_row(const RunConfig& c, const RunRow& r, std::ostream& os) {
  os << kRunSchema << ',' << to_string(c.problem) << ',' << csv_field(c.problem == ProblemKind::Wave ? "" : c.variant)
     << ',' << csv_field(r.eps_strategy) << ',' << csv_field(r.perturbation) << ',' << c.seed << ','
     << format_number(r.tau) << ",data," << r.level << ',' << format_number(r.h) << ',' << r.dofs << ','
     << format_number(r.eps);
  for (const auto& m : metric_names(c.problem)) os << ',' << format_number(r.metrics.at(m));
  os << ',' << format_number(r.estimator) << ',' << format_number(r.reg_norm) << ',' << r.iterations << '\n';
}

void write_slope_row(const RunConfig& c, const std::vector<RunRow>& rows, std::ostream& os) {
  if (rows.size() < 2) return;
  std::vector<double> dofs;
  for (const auto& r : rows) dofs.push_back(static_cast<double>(r.dofs));
  const std::size_t pts = std::min<std::size_t>(3, rows.size());
  auto slope = [&](auto get) {
    std::vector<double> y;
    for (const auto& r : rows) y.push_back(get(r));
    return format_number(loglog_slope(dofs, y, pts));
  };
  const RunRow& last = rows.back();
  os << kRunSchema << ',' << to_string(c.problem) << ',' << csv_field(c.problem == ProblemKind::Wave ? "" : c.variant)
     << ',' << csv_field(last.eps_strategy) << ',' << csv_field(last.perturbation) << ',' << c.seed << ','
     << format_number(last.tau) << ",slope,,,,";
  for (const auto& m : metric_names(c.problem)) os << ',' << slope([&](const RunRow& r) { return r.metrics.at(m); });
  os << ',' << slope([](const RunRow& r) { return r.estimator; }) << ",,\n";
}

void sweep(const RunConfig& c, std::ostream& os, bool slopes) {
  write_run_header(c, os);
  for (const auto& eps : c.eps) {
    for (double tau : c.tau) {
      std::vector<RunRow> rows;
      for (int level : c.levels) {
        try {
          rows.push_back(run_single(c, level, eps, tau));
        } catch (const std::exception& e) {
          throw std::runtime_error("level " + std::to_string(level) + ": " + e.what());
        }
        write_run_row(c, rows.back(), os);
      }
      if (slopes) write_slope_row(c, rows, os);
    }
  }
}

std::string py_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
  return s + "]";
}

std::string py_str(const std::string& s) {
  std::string q = "'";
  for (char ch : s) q += (ch == '\'' || ch == '\\') ? std::string("\\") + ch : std::string(1, ch);
  return q + "'";
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::Cauchy: return "cauchy";
    case ProblemKind::Wave: return "wave";
    case ProblemKind::Heat: return "heat";
  }
  return "cauchy";
}

ProblemKind parse_problem(const std::string& text) {
  if (text == "cauchy") return ProblemKind::Cauchy;
  if (text == "wave") return ProblemKind::Wave;
  if (text == "heat") return ProblemKind::Heat;
  throw ConfigError("unknown problem '" + text + "' (cauchy, wave, heat)");
}

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const int a = static_cast<int>(parse_int("levels", trim(text.substr(0, colon))));
    const int b = static_cast<int>(parse_int("levels", trim(text.substr(colon + 1))));
    if (b < a) throw ConfigError("empty level range '" + text + "'");
    for (int l = a; l <= b; ++l) out.push_back(l);
  } else {
    for (const auto& s : split(text, ',')) out.push_back(static_cast<int>(parse_int("levels", s)));
  }
  if (out.empty()) throw ConfigError("no levels given");
  for (int l : out) {
    if (l < 0) throw ConfigError("levels must be nonnegative");
  }
  return out;
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream os;
  os << "command = " << c.command << '\n';
  os << "problem = " << to_string(c.problem) << '\n';
  os << "case = " << c.variant << '\n';
  os << "levels = ";
  for (std::size_t i = 0; i < c.levels.size(); ++i) os << (i ? "," : "") << c.levels[i];
  os << '\n';
  os << "eps = ";
  for (std::size_t i = 0; i < c.eps.size(); ++i) os << (i ? "," : "") << to_string(c.eps[i]);
  os << '\n';
  os << "tau = " << join_numbers(c.tau) << '\n';
  os << "perturb = " << c.perturb << '\n';
  os << "seed = " << c.seed << '\n';
  os << "tol = " << join_numbers({c.tol}) << '\n';
  os << "maxit = " << c.maxit << '\n';
  os << "solver = " << c.solver << '\n';
  os << "infsup = " << c.infsup << '\n';
  os << "truth_extra = " << c.truth_extra << '\n';
  os << "out = " << c.out << '\n';
  return os.str();
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string k = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (k == "command") {
      c.command = v;
    } else if (k == "problem") {
      c.problem = parse_problem(v);
    } else if (k == "case") {
      c.variant = v;
    } else if (k == "levels") {
      c.levels = parse_levels(v);
    } else if (k == "eps") {
      c.eps.clear();
      for (const auto& s : split(v, ',')) c.eps.push_back(parse_eps(s));
      if (c.eps.empty()) throw ConfigError("no eps strategy given");
    } else if (k == "tau") {
      c.tau.clear();
      for (const auto& s : split(v, ',')) {
        const double t = parse_double(k, s);
        if (t < 0.0) throw ConfigError("tau must be nonnegative");
        c.tau.push_back(t);
      }
      if (c.tau.empty()) throw ConfigError("no tau given");
    } else if (k == "perturb") {
      parse_perturbation(v);
      c.perturb = v;
    } else if (k == "seed") {
      const long long s = parse_int(k, v);
      if (s < 0) throw ConfigError("seed must be nonnegative");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (k == "tol") {
      c.tol = parse_double(k, v);
    } else if (k == "maxit") {
      c.maxit = static_cast<int>(parse_int(k, v));
    } else if (k == "solver") {
      if (v != "spd" && v != "mixed") throw ConfigError("solver must be spd or mixed");
      c.solver = v;
    } else if (k == "infsup") {
      c.infsup = v;
    } else if (k == "truth_extra") {
      c.truth_extra = static_cast<int>(parse_int(k, v));
    } else if (k == "out") {
      c.out = v;
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + k + "'");
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void save_config(const RunConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config '" + path + "'");
  out << to_config_text(c);
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_config_text(a) == to_config_text(b); }

RunRow run_single(const RunConfig& c, int level, const EpsStrategy& eps, double tau) {
  ProblemSetup s;
  s.kind = c.problem;
  s.variant = c.variant;
  s.level = level;
  s.eps = eps;
  s.perturbation = parse_perturbation(c.perturb);
  s.perturbation.tau = tau;
  s.perturbation.seed = c.seed;
  const ProblemInstance inst = make_problem(s);
  const SolveReport rep = c.solver == "mixed" ? solve_mixed(inst.problem) : solve_spd(inst.problem, c.tol, c.maxit);
  RunRow r;
  r.level = level;
  r.h = inst.h;
  r.dofs = inst.dofs();
  r.eps_strategy = c.problem == ProblemKind::Wave ? "none" : to_string(eps);
  r.eps = inst.eps;
  r.tau = tau;
  r.perturbation = perturbation_label(s.perturbation);
  r.metrics = inst.metrics(rep.u);
  r.estimator = rep.estimator;
  r.reg_norm = rep.regularizer_norm;
  r.iterations = rep.iterations;
  return r;
}

void cmd_solve(const RunConfig& c, std::ostream& os) {
  RunConfig one = c;
  one.levels = {c.levels.front()};
  one.eps = {c.eps.front()};
  one.tau = {c.tau.front()};
  sweep(one, os, false);
}

void cmd_convergence(const RunConfig& c, std::ostream& os) { sweep(c, os, true); }

void cmd_perturbation_study(const RunConfig& c, std::ostream& os) {
  if (parse_perturbation(c.perturb).kind == PerturbKind::None) {
    throw ConfigError("perturbation study needs a perturbation kind");
  }
  sweep(c, os, false);
}

void cmd_infsup(const RunConfig& c, std::ostream& os) {
  auto run = [&](const std::vector<int>& levels, int extra, bool fortin) {
    if (c.infsup == "cauchy_b1") return cauchy_infsup_sweep(levels, extra, fortin);
    if (c.infsup == "wave") return wave_infsup_sweep(levels, extra, fortin);
    if (c.infsup == "trace") return trace_infsup_sweep(levels, extra, fortin);
    if (c.infsup == "heat_tensor") return verify_heat_tensor_infsup(levels, 2, extra);
    throw ConfigError("unknown infsup pair '" + c.infsup + "' (cauchy_b1, trace, wave, heat_tensor)");
  };
  os << "schema,name,row,level,trial_dofs,truth_extra,rho,fortin_norm,orthogonality,bubble_constant,flagged\n";
  auto write = [&](const InfSupReport& r, const std::string& row) {
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
      os << kInfSupSchema << ',' << r.name << ',' << row << ',' << r.levels[i] << ',' << r.trial_dofs[i] << ','
         << r.truth_levels_extra << ',' << format_number(r.rho[i]) << ','
         << (i < r.fortin_norm.size() ? format_number(r.fortin_norm[i]) : "") << ','
         << (i < r.orthogonality.size() ? format_number(r.orthogonality[i]) : "") << ','
         << (r.bubble_constant >= 0.0 ? format_number(r.bubble_constant) : "") << ',' << (r.flagged ? 1 : 0) << '\n';
    }
  };
  write(run({c.levels.front()}, 0, false), "identity");
  write(run(c.levels, c.truth_extra, true), "data");
}

void cmd_plot(const std::string& csv_path, std::ostream& os) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("cannot open CSV '" + csv_path + "'");
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw ConfigError("empty CSV '" + csv_path + "'");
  const auto header = parse_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  if (!col.count("schema") || !col.count("row")) throw ConfigError("not an lsfem CSV: missing schema/row columns");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto f = parse_csv_line(line);
    if (f.size() != header.size()) throw ConfigError("malformed CSV row: " + line);
    if (f[col["row"]] == "data") rows.push_back(std::move(f));
  }
  if (rows.empty()) throw ConfigError("CSV has no data rows");
  const std::string schema = rows.front()[col["schema"]];
  auto num = [&](const std::vector<std::string>& r, const std::string& name) {
    return parse_double(name, r[col.at(name)]);
  };

  os << "# Generated by lsfem plot from " << csv_path << "\n";
  os << "import matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n";
  os << "fig, ax = plt.subplots(figsize=(6, 4.5))\n";
  if (schema == kInfSupSchema) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;
    for (const auto& r : rows) {
      auto& s = series[r[col["name"]]];
      s.first.push_back(num(r, "level"));
      s.second.push_back(num(r, "rho"));
    }
    for (const auto& [name, s] : series) {
      os << "ax.plot(" << py_list(s.first) << ", " << py_list(s.second) << ", 'o-', label=" << py_str(name) << ")\n";
    }
    os << "ax.set_xlabel('level')\nax.set_ylabel('estimated inf-sup constant')\nax.set_ylim(bottom=0)\n";
  } else if (schema == kRunSchema) {
    static const std::set<std::string> fixed{"schema", "problem", "case", "eps_strategy", "perturbation", "seed",
                                             "tau",    "row",     "level", "h",           "dofs",         "eps",
                                             "reg_norm", "iterations"};
    std::vector<std::string> metrics;
    for (const auto& h : header) {
      if (!fixed.count(h)) metrics.push_back(h);
    }
    // Group by eps strategy and tau; plot against tau when a group has one level.
    std::map<std::string, std::vector<const std::vector<std::string>*>> groups;
    std::set<std::string> levels;
    for (const auto& r : rows) {
      groups[r[col["eps_strategy"]] + " " + r[col["perturbation"]]].push_back(&r);
      levels.insert(r[col["level"]]);
    }
    const bool vs_tau = levels.size() == 1;
    os << "# columns: x = " << (vs_tau ? "tau" : "dofs") << ", y =";
    for (const auto& m : metrics) os << ' ' << m;
    os << "\n";
    for (const auto& [name, g] : groups) {
      for (const auto& m : metrics) {
        std::vector<double> x, y;
        for (const auto* r : g) {
          x.push_back(vs_tau ? num(*r, "tau") : num(*r, "dofs"));
          y.push_back(num(*r, m));
        }
        os << "ax.loglog(" << py_list(x) << ", " << py_list(y) << ", 'o-', label=" << py_str(name + " " + m) << ")\n";
      }
    }
    os << "ax.set_xlabel(" << py_str(vs_tau ? "perturbation size tau" : "# DoFs") << ")\n";
    os << "ax.set_ylabel('relative error / estimator')\n";
  } else {
    throw ConfigError("unknown CSV schema '" + schema + "'");
  }
  os << "ax.grid(True, which='both', alpha=0.3)\nax.legend(fontsize=7)\nfig.tight_layout()\n";
  os << "fig.savefig(" << py_str(csv_path + ".png") << ", dpi=150)\n";
}

void run_command(const RunConfig& c, std::ostream& fallback) {
  std::ofstream file;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) throw ConfigError("cannot write '" + c.out + "'");
  }
  std::ostream& os = c.out.empty() ? fallback : file;
  if (c.command == "solve") {
    cmd_solve(c, os);
  } else if (c.command == "convergence") {
    cmd_convergence(c, os);
  } else if (c.command == "perturb") {
    cmd_perturbation_study(c, os);
  } else if (c.command == "infsup") {
    cmd_infsup(c, os);
  } else {
    throw ConfigError("unknown command '" + c.command + "'");
  }
}

}  // namespace lsfem
