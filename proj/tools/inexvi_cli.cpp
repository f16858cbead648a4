#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "inexvi/inexvi.hpp"

using namespace inexvi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitReference = 4;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Fills options of `app` that were not given on the command line from a flat
// "key = value" file. Keys may use '_' or '-'.
void apply_config_file(CLI::App& app, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = app.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

Point parse_point(const std::string& text) {
  std::string body = text;
  if (std::ifstream file(text); file) {
    std::stringstream ss;
    ss << file.rdbuf();
    body = ss.str();
  }
  std::replace_if(body.begin(), body.end(), [](char c) { return c == ',' || c == '(' || c == ')'; }, ' ');
  std::istringstream is(body);
  std::vector<double> vals;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw UsageError("bad coordinate '" + tok + "'");
    vals.push_back(v);
  }
  if (vals.empty()) throw UsageError("empty point");
  return Eigen::Map<Point>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

template <class Fn>
int write_output(const std::string& path, Fn fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  fn(out);
  return kExitOk;
}

struct SolveOptions {
  std::string problem;
  std::string method = "einexpm";
  std::optional<double> alpha, gamma_bar, beta, sigma, rho, backtrack, tol, fw_floor;
  std::optional<int> max_outer;
  std::optional<std::int64_t> fw_max_iter;
  std::string stop = "displacement";
  std::string out;
};

FWConfig fw_from(const SolveOptions& o) {
  FWConfig fw;
  if (o.fw_floor) fw.abs_gap_floor = *o.fw_floor;
  if (o.fw_max_iter) fw.max_iter = *o.fw_max_iter;
  return fw;
}

int cmd_solve(const SolveOptions& o) {
  const BenchmarkProblem prob = make_problem(o.problem);
  const StopRule stop = parse_stop_rule(o.stop);
  SolveTrace trace;
  if (o.method == "einexpm") {
    EInexPMConfig cfg;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.gamma_bar) cfg.gamma_bar = *o.gamma_bar;
    if (o.tol) cfg.outer_tol = *o.tol;
    if (o.max_outer) cfg.max_outer = *o.max_outer;
    cfg.fw = fw_from(o);
    cfg.stop = stop;
    trace = einexpm_solve(prob, cfg);
  } else if (o.method == "einexpmls") {
    LSConfig cfg;
    if (o.beta) cfg.beta_lo = cfg.beta_hi = *o.beta;
    if (o.sigma) cfg.sigma = *o.sigma;
    if (o.rho) cfg.rho = *o.rho;
    if (o.backtrack) cfg.backtrack = *o.backtrack;
    if (o.gamma_bar) cfg.gamma_bar = *o.gamma_bar;
    if (o.tol) cfg.outer_tol = *o.tol;
    if (o.max_outer) cfg.max_outer = *o.max_outer;
    cfg.fw = fw_from(o);
    cfg.stop = stop;
    trace = einexpmls_solve(prob, cfg);
  } else {
    throw UsageError("unknown method '" + o.method + "' (expected einexpm or einexpmls)");
  }
  for (const auto& w : trace.warnings) std::cerr << "warning: " << w << '\n';
  write_output(o.out, [&](std::ostream& os) { write_trace_csv(os, trace); });
  const double residual = natural_residual(trace.x_final, prob.field, prob.set);
  std::cout << "status=" << to_string(trace.status) << " outer=" << trace.outer_iterations
            << " fw_total=" << trace.fw_total << " residual=" << fmt_double(residual) << '\n';
  return trace.status == Status::converged ? kExitOk : kExitNoConvergence;
}

int cmd_table1(const std::string& out) {
  const auto rows = run_table1();
  write_output(out, [&](std::ostream& os) { write_table1_csv(os, rows); });
  const bool all = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.status == Status::converged; });
  return all ? kExitOk : kExitNoConvergence;
}

int cmd_table3(const std::string& out, std::vector<int> dims, std::vector<double> ps) {
  if (dims.empty()) dims = table3_dims();
  const auto rows = run_table3(dims, ps);
  write_output(out, [&](std::ostream& os) { write_table3_csv(os, rows); });
  const bool all = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.status == Status::converged; });
  return all ? kExitOk : kExitNoConvergence;
}

int cmd_verify(const std::string& problem, const std::string& x_text, int samples, std::uint64_t seed,
               double vi_tol, double residual_tol) {
  const BenchmarkProblem prob = make_problem(problem);
  Point x;
  if (x_text == "ref") {
    if (!prob.x_ref) throw UsageError(prob.name + " has no reference solution");
    x = *prob.x_ref;
  } else if (x_text == "start") {
    x = prob.x_start;
  } else {
    x = parse_point(x_text);
  }
  if (x.size() != prob.set.dim()) throw UsageError("point has wrong dimension");
  if (!prob.set.contains(x, 1e-10)) throw UsageError("point is infeasible");
  const double vi = brute_force_vi_check(x, prob.field, prob.set, samples, seed);
  const double residual = natural_residual(x, prob.field, prob.set);
  const bool pass = vi >= -vi_tol && residual <= residual_tol;
  std::cout << "vi_min=" << fmt_double(vi) << " residual=" << fmt_double(residual)
            << " verdict=" << (pass ? "pass" : "fail") << '\n';
  return pass ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extragradient solvers with Frank-Wolfe inexact projections"};
  app.require_subcommand(1);

  SolveOptions so;
  std::string solve_config;
  auto* solve = app.add_subcommand("solve", "Run one solver and write its trace");
  solve->add_option("--problem", so.problem, "linear-saddle | non-lipschitz | th:d=..,p=..,h=.. | zero[:d=..]");
  solve->add_option("--method", so.method, "einexpm | einexpmls")->capture_default_str();
  solve->add_option("--alpha", so.alpha, "EInexPM step size");
  solve->add_option("--gamma-bar", so.gamma_bar, "Inexactness bound");
  solve->add_option("--beta", so.beta, "EInexPMLS projection step");
  solve->add_option("--sigma", so.sigma, "EInexPMLS initial trial fraction");
  solve->add_option("--rho", so.rho, "Armijo constant");
  solve->add_option("--backtrack", so.backtrack, "Armijo reduction factor");
  solve->add_option("--tol", so.tol, "Outer stopping tolerance");
  solve->add_option("--max-outer", so.max_outer, "Outer iteration cap");
  solve->add_option("--fw-max-iter", so.fw_max_iter, "Frank-Wolfe iteration cap per projection");
  solve->add_option("--fw-floor", so.fw_floor, "Absolute Frank-Wolfe gap floor");
  solve->add_option("--stop", so.stop, "displacement | literal | reference")->capture_default_str();
  solve->add_option("--out", so.out, "Trace CSV path (stdout when omitted)");
  solve->add_option("--config", solve_config, "key = value file; flags take precedence");

  std::string t1_out;
  auto* table1 = app.add_subcommand("table1", "Sweep EInexPM on the linear saddle problem");
  table1->add_option("--out", t1_out, "CSV path (stdout when omitted)");

  std::string t3_out;
  std::vector<int> t3_dims;
  std::vector<double> t3_ps{10.0, 15.0};
  auto* table3 = app.add_subcommand("table3", "Sweep EInexPMLS on T_h with h = 0.2");
  table3->add_option("--out", t3_out, "CSV path (stdout when omitted)");
  table3->add_option("--dims", t3_dims, "Dimensions (default 5..20, 25, 50, 100)")->delimiter(',');
  table3->add_option("--p", t3_ps, "Norm exponents")->delimiter(',')->capture_default_str();

  std::string v_problem;
  std::string v_x = "ref";
  int v_samples = 10'000;
  std::uint64_t v_seed = 0x5eed;
  double v_vi_tol = 1e-6;
  double v_res_tol = 1e-4;
  auto* verify = app.add_subcommand("verify", "Check a candidate solution by sampling and residual");
  verify->add_option("--problem", v_problem)->required();
  verify->add_option("--x", v_x, "Coordinates 'a,b,..', a file, 'ref' or 'start'")->capture_default_str();
  verify->add_option("--samples", v_samples)->capture_default_str();
  verify->add_option("--seed", v_seed)->capture_default_str();
  verify->add_option("--vi-tol", v_vi_tol)->capture_default_str();
  verify->add_option("--residual-tol", v_res_tol)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve->parsed()) {
      if (!solve_config.empty()) apply_config_file(*solve, solve_config);
      if (so.problem.empty()) throw UsageError("--problem is required");
      return cmd_solve(so);
    }
    if (table1->parsed()) return cmd_table1(t1_out);
    if (table3->parsed()) return cmd_table3(t3_out, t3_dims, t3_ps);
    if (verify->parsed()) return cmd_verify(v_problem, v_x, v_samples, v_seed, v_vi_tol, v_res_tol);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ReferenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitReference;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  }
  return kExitUsage;
}
