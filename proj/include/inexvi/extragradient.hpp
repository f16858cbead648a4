#pragma once

// Extragradient methods with feasible inexact projections:
//   EInexPM   - constant step alpha, tolerance gamma_k from a summable schedule;
//   EInexPMLS - Armijo search along y - x followed by a halfspace step.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "inexvi/core.hpp"
#include "inexvi/fw_projection.hpp"
#include "inexvi/problems.hpp"

namespace inexvi {

enum class Schedule { harmonic, log, custom };

/// When an outer loop declares convergence.
///  displacement: ||x^k - y^k|| <= outer_tol.
///  literal:      ||x^k - y^k|| <= outer_tol or ||y^k - x^{k+1}|| <= outer_tol
///                (the exact test y^k = x^{k+1} read with a tolerance).
///  reference:    ||x^k - x_ref|| <= outer_tol, checked before the step.
enum class StopRule { displacement, literal, reference };

enum class Status { converged, max_outer, stalled };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::converged: return "converged";
    case Status::max_outer: return "max_outer";
    case Status::stalled: return "stalled";
  }
  return "?";
}

inline std::string_view to_string(StopRule r) {
  switch (r) {
    case StopRule::displacement: return "displacement";
    case StopRule::literal: return "literal";
    case StopRule::reference: return "reference";
  }
  return "?";
}

inline StopRule parse_stop_rule(std::string_view s) {
  if (s == "displacement") return StopRule::displacement;
  if (s == "literal") return StopRule::literal;
  if (s == "reference") return StopRule::reference;
  throw UsageError("unknown stop rule '" + std::string(s) + "'");
}

struct EInexPMConfig {
  double alpha = 0.1;
  double gamma_bar = 0.25;
  Schedule schedule = Schedule::harmonic;
  double b_bar = 1.0;
  /// a_k for Schedule::custom; must be non-negative and summable.
  std::function<double(int)> custom_a;
  double outer_tol = 1e-6;
  int max_outer = 10'000;
  FWConfig fw;
  StopRule stop = StopRule::displacement;
  bool check_certificates = true;

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw UsageError("EInexPM: alpha must be positive");
    if (!(gamma_bar > 0.0 && gamma_bar < 0.5)) {
      throw UsageError("EInexPM: gamma_bar must lie in (0, 1/2)");
    }
    if (!(b_bar > 0.0)) throw UsageError("EInexPM: b_bar must be positive");
    if (schedule == Schedule::custom && !custom_a) {
      throw UsageError("EInexPM: custom schedule needs custom_a");
    }
    if (!(outer_tol > 0.0)) throw UsageError("EInexPM: outer_tol must be positive");
    if (max_outer <= 0) throw UsageError("EInexPM: max_outer must be positive");
    fw.validate();
  }

  /// eta = 1 - alpha^2 L^2 - 2 gamma_bar.
  double eta_bar(double lipschitz) const {
    return 1.0 - alpha * alpha * lipschitz * lipschitz - 2.0 * gamma_bar;
  }
  /// nu = alpha^2 (1 - gamma_bar + alpha L)^2 / (1 - gamma_bar)^4.
  double nu_bar(double lipschitz) const {
    const double g = 1.0 - gamma_bar;
    const double t = g + alpha * lipschitz;
    return alpha * alpha * t * t / (g * g * g * g);
  }
  /// Step-size condition under which convergence is guaranteed.
  bool step_condition_holds(double lipschitz) const {
    return alpha * lipschitz < std::sqrt(1.0 - 2.0 * gamma_bar);
  }
};

struct LSConfig {
  double beta_lo = 1.0;
  double beta_hi = 1.0;
  /// k -> beta_k; empty means constant beta_hi.
  std::function<double(int)> beta_rule;
  double sigma = 0.99;
  double rho = 0.5;
  double backtrack = 0.5;
  double gamma_bar = 0.1;
  double outer_tol = 1e-6;
  int max_outer = 10'000;
  int max_backtracks = 200;
  FWConfig fw;
  StopRule stop = StopRule::displacement;
  bool check_certificates = true;

  static double gamma_cap(double rho) { return std::min(1.0 - rho, 2.0 - std::sqrt(3.0)); }

  void validate() const {
    if (!(beta_lo > 0.0 && beta_lo <= beta_hi) || !std::isfinite(beta_hi)) {
      throw UsageError("EInexPMLS: need 0 < beta_lo <= beta_hi");
    }
    auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!open_unit(sigma)) throw UsageError("EInexPMLS: sigma must lie in (0, 1)");
    if (!open_unit(rho)) throw UsageError("EInexPMLS: rho must lie in (0, 1)");
    if (!open_unit(backtrack)) throw UsageError("EInexPMLS: backtrack must lie in (0, 1)");
    if (!(gamma_bar > 0.0 && gamma_bar < gamma_cap(rho))) {
      throw UsageError("EInexPMLS: gamma_bar must lie in (0, min(1 - rho, 2 - sqrt(3)))");
    }
    if (!(outer_tol > 0.0)) throw UsageError("EInexPMLS: outer_tol must be positive");
    if (max_outer <= 0) throw UsageError("EInexPMLS: max_outer must be positive");
    if (max_backtracks <= 0) throw UsageError("EInexPMLS: max_backtracks must be positive");
    fw.validate();
  }

  double beta(int k) const {
    if (!beta_rule) return beta_hi;
    const double b = beta_rule(k);
    if (!(b >= beta_lo && b <= beta_hi)) throw UsageError("EInexPMLS: beta_rule left [beta_lo, beta_hi]");
    return b;
  }
  /// Constant tolerance used at every iteration.
  double gamma() const { return 0.999 * gamma_bar; }
};

struct IterationRecord {
  int k = 0;
  Point x;
  Point y;
  std::optional<Point> z;
  std::optional<Point> x_next;
  Point Fx;
  /// F(y^k) for EInexPM, F(z^k) for EInexPMLS.
  std::optional<Point> F_second;
  double step = 0.0;  // alpha or beta_k
  double gamma_k = 0.0;
  std::optional<double> lambda_k;
  std::optional<int> i_k;
  std::int64_t fw_iters_y = 0;
  std::int64_t fw_iters_x = 0;
  std::optional<double> dist_to_ref;
  /// ||x^k - y^k||.
  double displacement = 0.0;
  /// Largest certificate violation over the projections of this iteration.
  std::optional<double> certificate_violation;
};

struct SolveTrace {
  std::vector<IterationRecord> records;
  Status status = Status::max_outer;
  Point x_final;
  /// Index k of the iterate at which the run stopped.
  int outer_iterations = 0;
  std::int64_t fw_total = 0;
  std::vector<std::string> warnings;

  std::int64_t fw_sum() const {
    std::int64_t s = 0;
    for (const auto& r : records) s += r.fw_iters_y + r.fw_iters_x;
    return s;
  }
};

/// Failure inside a single outer step; carries what was computed so far.
class StepError : public SolverError {
 public:
  StepError(const std::string& what, IterationRecord rec) : SolverError(what), record(std::move(rec)) {}
  IterationRecord record;
};

/// a_k = b_{k-1} - b_k with b_0 = 2 b_bar.
inline double schedule_a(int k, const EInexPMConfig& cfg) {
  if (k < 1) throw UsageError("schedule: k must be >= 1");
  if (cfg.schedule == Schedule::custom) {
    const double a = cfg.custom_a(k);
    if (!(a >= 0.0)) throw UsageError("schedule: custom a_k must be >= 0");
    return a;
  }
  auto b = [&](int j) {
    if (j == 0) return 2.0 * cfg.b_bar;
    return cfg.schedule == Schedule::harmonic ? cfg.b_bar / j : cfg.b_bar / std::log(j + 1.0);
  };
  return b(k - 1) - b(k);
}

inline double gamma_schedule(int k, double F_norm_sq, const EInexPMConfig& cfg) {
  if (!(F_norm_sq >= 0.0)) throw UsageError("gamma_schedule: F_norm_sq must be >= 0");
  const double cap = 0.999 * cfg.gamma_bar;
  return std::min(cap, schedule_a(k, cfg) / std::max(F_norm_sq, 1e-30));
}

namespace detail {

template <FeasibleRegion S>
FWResult project(const Point& u, const Point& v, double gamma, const S& set, const FWConfig& tmpl) {
  FWConfig cfg = tmpl;
  cfg.gamma = gamma;
  return fw_project(u, v, set, cfg);
}

inline void note_certificate(IterationRecord& rec, const ProjectionCertificate& cert) {
  const double v = cert.feasible ? cert.worst_violation : std::numeric_limits<double>::infinity();
  rec.certificate_violation = std::max(rec.certificate_violation.value_or(-std::numeric_limits<double>::infinity()), v);
}

}  // namespace detail

/// One EInexPM iteration. Returns nullopt for x_next when the stop rule fired
/// on ||x - y||.
template <FeasibleRegion S>
IterationRecord einexpm_step(const Point& x, int k, const VectorField& F, const S& set,
                             const EInexPMConfig& cfg) {
  IterationRecord rec;
  rec.k = k;
  rec.x = x;
  rec.step = cfg.alpha;
  rec.Fx = F(x);
  rec.gamma_k = gamma_schedule(k, rec.Fx.squaredNorm(), cfg);

  const Point vy = x - cfg.alpha * rec.Fx;
  const FWResult ry = detail::project(x, vy, rec.gamma_k, set, cfg.fw);
  rec.fw_iters_y = ry.iterations;
  rec.y = ry.w;
  rec.displacement = (x - rec.y).norm();
  if (cfg.check_certificates) detail::note_certificate(rec, check_certificate(rec.y, x, vy, rec.gamma_k, set));
  if (ry.stopped_by == FWStop::max_iter) throw StepError("EInexPM: FW budget exhausted computing y", rec);
  if (cfg.stop != StopRule::reference && rec.displacement <= cfg.outer_tol) return rec;

  rec.F_second = F(rec.y);
  const Point vx = x - cfg.alpha * *rec.F_second;
  const FWResult rx = detail::project(x, vx, rec.gamma_k, set, cfg.fw);
  rec.fw_iters_x = rx.iterations;
  rec.x_next = rx.w;
  if (cfg.check_certificates) detail::note_certificate(rec, check_certificate(rx.w, x, vx, rec.gamma_k, set));
  if (rx.stopped_by == FWStop::max_iter) throw StepError("EInexPM: FW budget exhausted computing x_next", rec);
  return rec;
}

namespace detail {

/// Shared outer loop. `step(x, k)` returns the record; `done(rec)` decides
/// convergence after the step.
template <class Step, class Done>
SolveTrace outer_loop(const Point& x1, int max_outer, StopRule stop, double tol,
                      const std::optional<Point>& x_ref, Step step, Done done) {
  if (stop == StopRule::reference && !x_ref) throw UsageError("reference stop rule needs a reference solution");
  SolveTrace trace;
  Point x = x1;
  trace.status = Status::max_outer;
  for (int k = 1; k <= max_outer; ++k) {
    trace.outer_iterations = k;
    std::optional<double> dist;
    if (x_ref) dist = (x - *x_ref).norm();
    if (stop == StopRule::reference && *dist <= tol) {
      trace.status = Status::converged;
      break;
    }
    IterationRecord rec;
    try {
      rec = step(x, k);
    } catch (StepError& e) {
      e.record.dist_to_ref = dist;
      trace.records.push_back(std::move(e.record));
      trace.warnings.emplace_back(e.what());
      trace.status = Status::stalled;
      break;
    } catch (const OperatorDomainError&) {
      throw;
    } catch (const UsageError&) {
      throw;
    } catch (const SolverError& e) {
      trace.warnings.emplace_back(e.what());
      trace.status = Status::stalled;
      break;
    }
    rec.dist_to_ref = dist;
    const auto verdict = done(rec);
    trace.records.push_back(rec);
    if (verdict) {
      x = *verdict;
      trace.status = Status::converged;
      break;
    }
    x = *rec.x_next;
  }
  trace.x_final = x;
  trace.fw_total = trace.fw_sum();
  return trace;
}

}  // namespace detail

template <FeasibleRegion S>
SolveTrace einexpm_solve(const VectorField& F, const S& set, const EInexPMConfig& cfg, const Point& x1,
                         const std::optional<Point>& x_ref = std::nullopt,
                         std::optional<double> lipschitz = std::nullopt) {
  cfg.validate();
  if (x1.size() != set.dim() || !set.contains(x1, 1e-10)) throw UsageError("EInexPM: start point is infeasible");
  std::vector<std::string> warnings;
  if (lipschitz && !cfg.step_condition_holds(*lipschitz)) {
    std::ostringstream os;
    os << "alpha = " << cfg.alpha << " violates alpha < sqrt(1 - 2 gamma_bar) / L with L = " << *lipschitz
       << "; convergence is not guaranteed";
    warnings.push_back(os.str());
  }
  auto step = [&](const Point& x, int k) { return einexpm_step(x, k, F, set, cfg); };
  auto done = [&](const IterationRecord& r) -> std::optional<Point> {
    if (cfg.stop == StopRule::reference) return std::nullopt;
    if (!r.x_next) return r.x;
    if (cfg.stop == StopRule::literal && (r.y - *r.x_next).norm() <= cfg.outer_tol) return *r.x_next;
    return std::nullopt;
  };
  SolveTrace trace = detail::outer_loop(x1, cfg.max_outer, cfg.stop, cfg.outer_tol, x_ref, step, done);
  trace.warnings.insert(trace.warnings.begin(), warnings.begin(), warnings.end());
  return trace;
}

inline SolveTrace einexpm_solve(const BenchmarkProblem& prob, const EInexPMConfig& cfg,
                                const std::optional<Point>& x1 = std::nullopt) {
  return einexpm_solve(prob.field, prob.set, cfg, x1.value_or(prob.x_start), prob.x_ref, prob.lipschitz);
}

struct ArmijoResult {
  int i_k = 0;
  Point z;
};

/// Smallest i >= 0 with <F(x + sigma backtrack^i (y - x)), y - x> <= rho <F(x), y - x>.
inline ArmijoResult armijo_search(const Point& x, const Point& y, const VectorField& F, const LSConfig& cfg,
                                  const std::optional<Point>& Fx = std::nullopt) {
  require_same_dim(x, y, "armijo_search");
  const Point dir = y - x;
  if (!(dir.norm() > 0.0)) throw UsageError("armijo_search: y must differ from x");
  const double rhs = cfg.rho * (Fx ? *Fx : F(x)).dot(dir);
  double t = cfg.sigma;
  for (int i = 0; i <= cfg.max_backtracks; ++i, t *= cfg.backtrack) {
    Point z = x + t * dir;
    if (F(z).dot(dir) <= rhs) return {i, std::move(z)};
  }
  throw SolverError("line search failed");
}

/// lambda = -<Fz, z - x> / ||Fz||^2, so that x - lambda Fz projects x onto
/// {w : <Fz, w - z> <= 0} whenever x lies outside it.
inline double halfspace_stepsize(const Point& x, const Point& z, const Point& Fz) {
  require_same_dim(x, z, "halfspace_stepsize");
  require_same_dim(x, Fz, "halfspace_stepsize");
  const double n2 = Fz.squaredNorm();
  if (!(std::sqrt(n2) > 1e-300)) throw SolverError("vanishing operator at z");
  return -Fz.dot(z - x) / n2;
}

/// Outcome flags for a step that ended the run without producing x_next.
enum class LSSignal { proceed, small_displacement, degenerate_lambda, vanishing_operator };

template <FeasibleRegion S>
IterationRecord einexpmls_step(const Point& x, int k, const VectorField& F, const S& set, const LSConfig& cfg,
                               LSSignal* signal = nullptr) {
  LSSignal local = LSSignal::proceed;
  LSSignal& sig = signal ? *signal : local;
  sig = LSSignal::proceed;

  IterationRecord rec;
  rec.k = k;
  rec.x = x;
  rec.step = cfg.beta(k);
  rec.gamma_k = cfg.gamma();
  rec.Fx = F(x);

  const Point vy = x - rec.step * rec.Fx;
  const FWResult ry = detail::project(x, vy, rec.gamma_k, set, cfg.fw);
  rec.fw_iters_y = ry.iterations;
  rec.y = ry.w;
  rec.displacement = (x - rec.y).norm();
  if (cfg.check_certificates) detail::note_certificate(rec, check_certificate(rec.y, x, vy, rec.gamma_k, set));
  if (ry.stopped_by == FWStop::max_iter) throw StepError("EInexPMLS: FW budget exhausted computing y", rec);
  if (rec.displacement <= (cfg.stop == StopRule::reference ? 0.0 : cfg.outer_tol)) {
    sig = LSSignal::small_displacement;
    return rec;
  }

  ArmijoResult ls;
  try {
    ls = armijo_search(x, rec.y, F, cfg, rec.Fx);
  } catch (const SolverError& e) {
    throw StepError(e.what(), rec);
  }
  rec.i_k = ls.i_k;
  rec.z = ls.z;
  rec.F_second = F(ls.z);
  if (!(rec.F_second->norm() > 1e-300)) {
    sig = LSSignal::vanishing_operator;
    return rec;
  }
  const double lambda = halfspace_stepsize(x, ls.z, *rec.F_second);
  rec.lambda_k = lambda;
  if (!(lambda > 0.0)) {
    sig = LSSignal::degenerate_lambda;
    return rec;
  }

  const Point vx = x - lambda * *rec.F_second;
  const FWResult rx = detail::project(x, vx, rec.gamma_k, set, cfg.fw);
  rec.fw_iters_x = rx.iterations;
  rec.x_next = rx.w;
  if (cfg.check_certificates) detail::note_certificate(rec, check_certificate(rx.w, x, vx, rec.gamma_k, set));
  if (rx.stopped_by == FWStop::max_iter) throw StepError("EInexPMLS: FW budget exhausted computing x_next", rec);
  return rec;
}

template <FeasibleRegion S>
SolveTrace einexpmls_solve(const VectorField& F, const S& set, const LSConfig& cfg, const Point& x1,
                           const std::optional<Point>& x_ref = std::nullopt) {
  cfg.validate();
  if (x1.size() != set.dim() || !set.contains(x1, 1e-10)) throw UsageError("EInexPMLS: start point is infeasible");
  LSSignal sig = LSSignal::proceed;
  auto step = [&](const Point& x, int k) { return einexpmls_step(x, k, F, set, cfg, &sig); };
  auto done = [&](const IterationRecord& r) -> std::optional<Point> {
    switch (sig) {
      case LSSignal::proceed:
        if (cfg.stop == StopRule::literal && (r.y - *r.x_next).norm() <= cfg.outer_tol) return *r.x_next;
        return std::nullopt;
      case LSSignal::vanishing_operator: return *r.z;
      case LSSignal::small_displacement:
      case LSSignal::degenerate_lambda: return r.x;
    }
    return std::nullopt;
  };
  return detail::outer_loop(x1, cfg.max_outer, cfg.stop, cfg.outer_tol, x_ref, step, done);
}

inline SolveTrace einexpmls_solve(const BenchmarkProblem& prob, const LSConfig& cfg,
                                  const std::optional<Point>& x1 = std::nullopt) {
  return einexpmls_solve(prob.field, prob.set, cfg, x1.value_or(prob.x_start), prob.x_ref);
}

}  // namespace inexvi
