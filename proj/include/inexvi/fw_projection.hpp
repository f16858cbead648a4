#pragma once

// Frank-Wolfe inner solver computing feasible inexact projections
// w in P^gamma_C(u, v). With gamma = 0 and a small absolute gap floor it
// doubles as a near-exact projector.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string_view>

#include "inexvi/core.hpp"

namespace inexvi {

struct FWConfig {
  double gamma = 0.0;
  /// Absolute stop on the FW gap; needed because gamma ||w - u||^2 is zero
  /// at the default start w_0 = u.
  double abs_gap_floor = 1e-12;
  std::int64_t max_iter = 10'000'000;
  std::optional<Point> start;

  void validate() const {
    if (!(gamma >= 0.0)) throw UsageError("FWConfig: gamma must be >= 0");
    if (!(abs_gap_floor >= 0.0)) throw UsageError("FWConfig: abs_gap_floor must be >= 0");
    if (max_iter <= 0) throw UsageError("FWConfig: max_iter must be positive");
  }
};

enum class FWStop { relative, absolute, max_iter };

inline std::string_view to_string(FWStop s) {
  switch (s) {
    case FWStop::relative: return "relative";
    case FWStop::absolute: return "absolute";
    case FWStop::max_iter: return "max_iter";
  }
  return "?";
}

struct FWResult {
  Point w;
  /// Number of LO-oracle calls (one per FW iteration, including the final
  /// gap evaluation that triggered the stop).
  std::int64_t iterations = 0;
  /// -s*_l at exit, the FW duality gap of the projection subproblem.
  double final_gap = 0.0;
  FWStop stopped_by = FWStop::max_iter;
};

struct LOGap {
  Point z;
  double s_star = 0.0;
};

/// One LO call on the gradient w - v of psi_v(y) = ||y - v||^2 / 2.
/// s_star <= 0 always (w itself is a candidate).
template <FeasibleRegion S>
LOGap lo_gap(const Point& w, const Point& v, const S& set) {
  const Point grad = w - v;
  LOGap out{set.lo_oracle(grad), 0.0};
  out.s_star = grad.dot(out.z - w);
  return out;
}

/// Exact line search on psi_v along [w, z]: alpha = min{1, -s* / ||z - w||^2}.
inline Point fw_step(const Point& w, const Point& z, double s_star) {
  require_same_dim(w, z, "fw_step");
  const double dist2 = (z - w).squaredNorm();
  if (dist2 == 0.0) {
    if (s_star < 0.0) throw SolverError("fw_step: zero direction with negative gap");
    return w;
  }
  const double alpha = std::min(1.0, -s_star / dist2);
  return w + alpha * (z - w);
}

template <FeasibleRegion S>
FWResult fw_project(const Point& u, const Point& v, const S& set, const FWConfig& cfg) {
  cfg.validate();
  require_same_dim(u, v, "fw_project");
  if (u.size() != set.dim()) throw UsageError("fw_project: dimension differs from the set");
  if (!all_finite(v)) throw UsageError("fw_project: non-finite target point");

  FWResult res;
  res.w = cfg.start ? *cfg.start : u;
  if (res.w.size() != u.size()) throw UsageError("fw_project: start has wrong dimension");

  while (true) {
    LOGap g = lo_gap(res.w, v, set);
    ++res.iterations;
    // Rounding can make s* marginally positive at the optimum.
    res.final_gap = std::max(0.0, -g.s_star);
    const double rel = cfg.gamma * (res.w - u).squaredNorm();
    if (res.final_gap <= rel) {
      res.stopped_by = FWStop::relative;
      return res;
    }
    if (res.final_gap <= cfg.abs_gap_floor) {
      res.stopped_by = FWStop::absolute;
      return res;
    }
    if (res.iterations >= cfg.max_iter) {
      res.stopped_by = FWStop::max_iter;
      return res;
    }
    res.w = fw_step(res.w, g.z, g.s_star);
  }
}

}  // namespace inexvi
