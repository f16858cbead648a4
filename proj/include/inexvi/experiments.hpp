#pragma once

// Benchmark sweeps shared by the command-line tool and the acceptance
// checks, plus CSV formatting.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "inexvi/extragradient.hpp"
#include "inexvi/problems.hpp"
#include "inexvi/residual.hpp"

namespace inexvi {

/// Raised when a reference solution cannot be validated.
class ReferenceError : public SolverError {
 public:
  using SolverError::SolverError;
};

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Worker count for sweeps: VIP_EXTRAGRAD_THREADS if set and positive,
/// otherwise the hardware concurrency.
inline unsigned sweep_threads() {
  unsigned n = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VIP_EXTRAGRAD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers; results keep index
/// order. The first exception thrown by any task is rethrown.
template <class Fn>
auto parallel_map(std::size_t n, unsigned threads, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  std::vector<decltype(fn(std::size_t{}))> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned count = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

// Table 1: EInexPM on the linear saddle problem.

inline constexpr double kTable1Tol = 4.3e-5;

inline std::vector<std::pair<double, double>> table1_grid() {
  return {{0.01, 0.01},  {0.01, 0.106}, {0.01, 0.49},  {0.11, 0.01},  {0.11, 0.106},
          {0.11, 0.394}, {0.21, 0.01},  {0.21, 0.106}, {0.21, 0.394}, {0.31, 0.01},
          {0.31, 0.106}, {0.31, 0.298}, {0.41, 0.01},  {0.41, 0.106}};
}

inline EInexPMConfig table1_config(double alpha, double gamma_bar) {
  EInexPMConfig cfg;
  cfg.alpha = alpha;
  cfg.gamma_bar = gamma_bar;
  cfg.stop = StopRule::literal;
  cfg.outer_tol = kTable1Tol;
  cfg.max_outer = 1000;
  cfg.check_certificates = false;
  return cfg;
}

struct Table1Row {
  double alpha = 0.0;
  double gamma_bar = 0.0;
  int outer_steps = 0;
  std::int64_t fw_total = 0;
  Status status = Status::max_outer;
};

inline std::vector<Table1Row> run_table1(unsigned threads = sweep_threads()) {
  const auto grid = table1_grid();
  const BenchmarkProblem prob = linear_saddle_operator();
  auto rows = parallel_map(grid.size(), threads, [&](std::size_t i) {
    const auto [alpha, gb] = grid[i];
    const SolveTrace t = einexpm_solve(prob, table1_config(alpha, gb));
    return Table1Row{alpha, gb, t.outer_iterations, t.fw_total, t.status};
  });
  std::sort(rows.begin(), rows.end(), [](const Table1Row& a, const Table1Row& b) {
    return std::pair(a.alpha, a.gamma_bar) < std::pair(b.alpha, b.gamma_bar);
  });
  return rows;
}

inline void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows) {
  os << "alpha,gamma_bar,outer_steps,fw_total\n";
  for (const auto& r : rows) {
    os << fmt_double(r.alpha) << ',' << fmt_double(r.gamma_bar) << ',' << r.outer_steps << ',' << r.fw_total
       << '\n';
  }
}

// Table 3: EInexPMLS on T_h with h = 0.2, counted until ||x^k - x*|| <= 1e-2.

inline constexpr double kTable3H = 0.2;
inline constexpr double kTable3Tol = 1e-2;

inline std::vector<int> table3_dims() {
  std::vector<int> d;
  for (int i = 5; i <= 20; ++i) d.push_back(i);
  d.insert(d.end(), {25, 50, 100});
  return d;
}

inline LSConfig table3_config() {
  LSConfig cfg;
  cfg.stop = StopRule::reference;
  cfg.outer_tol = kTable3Tol;
  cfg.max_outer = 100'000;
  cfg.check_certificates = false;
  return cfg;
}

/// Checks that the problem's reference point solves the VI.
inline void validate_reference(const BenchmarkProblem& prob, double tol = 1e-4) {
  if (!prob.x_ref) throw ReferenceError(prob.name + ": no reference solution");
  if (!prob.set.contains(*prob.x_ref, 1e-10)) throw ReferenceError(prob.name + ": reference is infeasible");
  const double r = natural_residual(*prob.x_ref, prob.field, prob.set);
  if (!(r <= tol)) throw ReferenceError(prob.name + ": reference residual " + fmt_double(r) + " exceeds tolerance");
}

struct Table3Row {
  int d = 0;
  double p = 0.0;
  int iterations = 0;
  Status status = Status::max_outer;
};

inline Table3Row run_table3_cell(int d, double p, const LSConfig& cfg = table3_config()) {
  const BenchmarkProblem prob = th_operator(d, p, kTable3H);
  validate_reference(prob);
  const SolveTrace t = einexpmls_solve(prob, cfg);
  return {d, p, t.outer_iterations, t.status};
}

inline std::vector<Table3Row> run_table3(const std::vector<int>& dims, const std::vector<double>& ps,
                                         unsigned threads = sweep_threads()) {
  std::vector<std::pair<int, double>> cells;
  for (double p : ps) {
    for (int d : dims) cells.emplace_back(d, p);
  }
  auto rows = parallel_map(cells.size(), threads,
                           [&](std::size_t i) { return run_table3_cell(cells[i].first, cells[i].second); });
  std::sort(rows.begin(), rows.end(),
            [](const Table3Row& a, const Table3Row& b) { return std::pair(a.p, a.d) < std::pair(b.p, b.d); });
  return rows;
}

inline void write_table3_csv(std::ostream& os, const std::vector<Table3Row>& rows) {
  os << "d,p,iterations\n";
  for (const auto& r : rows) os << r.d << ',' << fmt_double(r.p) << ',' << r.iterations << '\n';
}

// Figure 3 trace: T_h with d = 5, p = 10, h = 0.6 from (0, 0, 0, 0, 1).

inline BenchmarkProblem figure3_problem() { return th_operator(5, 10.0, 0.6); }

inline EInexPMConfig figure3_config() {
  EInexPMConfig cfg;
  cfg.alpha = 0.55;
  cfg.gamma_bar = 0.3;
  cfg.max_outer = 29;
  return cfg;
}

inline LSConfig figure3_ls_config() {
  LSConfig cfg;
  cfg.max_outer = 29;
  return cfg;
}

// Trace CSV: k,dist_ref,step_norm,gamma_k,lambda_k,i_k,fw_iters.

inline void write_trace_csv(std::ostream& os, const SolveTrace& trace) {
  os << "k,dist_ref,step_norm,gamma_k,lambda_k,i_k,fw_iters\n";
  for (const auto& r : trace.records) {
    os << r.k << ',' << (r.dist_to_ref ? fmt_double(*r.dist_to_ref) : "") << ',' << fmt_double(r.displacement)
       << ',' << fmt_double(r.gamma_k) << ',' << (r.lambda_k ? fmt_double(*r.lambda_k) : "") << ','
       << (r.i_k ? std::to_string(*r.i_k) : "") << ',' << (r.fw_iters_y + r.fw_iters_x) << '\n';
  }
}

}  // namespace inexvi
