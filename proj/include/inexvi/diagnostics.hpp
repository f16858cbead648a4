#pragma once

// Post-hoc checks of the per-iteration inequalities the convergence theory
// predicts, evaluated over a recorded SolveTrace.

#include <cmath>
#include <limits>
#include <string>

#include "inexvi/extragradient.hpp"

namespace inexvi {

inline constexpr double kInequalitySlack = 1e-8;

struct InequalityReport {
  std::string name;
  int checked = 0;
  int violations = 0;
  /// max over checked iterations of lhs - rhs.
  double worst_excess = -std::numeric_limits<double>::infinity();
  int worst_k = 0;
  int first_violation_k = 0;

  bool holds() const { return violations == 0; }

  void add(int k, double lhs, double rhs, double slack = kInequalitySlack) {
    ++checked;
    const double excess = lhs - rhs;
    if (!(excess <= worst_excess)) {
      worst_excess = excess;
      worst_k = k;
    }
    if (!(excess <= slack)) {
      if (violations == 0) first_violation_k = k;
      ++violations;
    }
  }
};

template <FeasibleRegion S>
InequalityReport check_feasibility(const SolveTrace& trace, const S& set, double tol = 1e-10) {
  InequalityReport rep{"feasibility"};
  auto one = [&](int k, const Point& p) { rep.add(k, set.contains(p, tol) ? 0.0 : 1.0, 0.0, 0.0); };
  for (const auto& r : trace.records) {
    one(r.k, r.x);
    one(r.k, r.y);
    if (r.z) one(r.k, *r.z);
    if (r.x_next) one(r.k, *r.x_next);
  }
  return rep;
}

inline InequalityReport check_certificates(const SolveTrace& trace, double tol = kCertificateTol) {
  InequalityReport rep{"certificates"};
  for (const auto& r : trace.records) {
    if (r.certificate_violation) rep.add(r.k, *r.certificate_violation, tol, 0.0);
  }
  return rep;
}

/// ||y - x|| <= s ||F(x)|| / (1 - gamma_k) and ||x+ - x|| <= s' ||F'|| / (1 - gamma_k),
/// with s' = alpha for EInexPM and lambda_k for EInexPMLS.
inline InequalityReport check_step_bounds(const SolveTrace& trace) {
  InequalityReport rep{"step bounds"};
  for (const auto& r : trace.records) {
    const double g = 1.0 - r.gamma_k;
    rep.add(r.k, (r.y - r.x).norm(), r.step * r.Fx.norm() / g);
    if (r.x_next && r.F_second) {
      const double s2 = r.lambda_k.value_or(r.step);
      rep.add(r.k, (*r.x_next - r.x).norm(), s2 * r.F_second->norm() / g);
    }
  }
  return rep;
}

/// ||x+ - x*||^2 <= ||x - x*||^2 - eta ||x - y||^2 + nu gamma_k ||F(x)||^2.
/// Without a global Lipschitz constant the local ratio ||F(x) - F(y)|| / ||x - y||
/// is used; the derivation only needs the bound on that pair.
inline InequalityReport check_quasi_fejer(const SolveTrace& trace, const Point& x_ref, const EInexPMConfig& cfg,
                                          std::optional<double> lipschitz = std::nullopt) {
  InequalityReport rep{"quasi-Fejer"};
  for (const auto& r : trace.records) {
    if (!r.x_next || !r.F_second) continue;
    const double dxy = (r.x - r.y).norm();
    double L = 0.0;
    if (lipschitz) {
      L = *lipschitz;
    } else if (dxy > 0.0) {
      L = (r.Fx - *r.F_second).norm() / dxy;
    }
    const double lhs = (*r.x_next - x_ref).squaredNorm();
    const double rhs = (r.x - x_ref).squaredNorm() - cfg.eta_bar(L) * dxy * dxy +
                       cfg.nu_bar(L) * r.gamma_k * r.Fx.squaredNorm();
    rep.add(r.k, lhs, rhs);
  }
  return rep;
}

/// Sum_k gamma_k ||F(x^k)||^2 <= Sum_k a_k <= b_0.
inline InequalityReport check_summability(const SolveTrace& trace, const EInexPMConfig& cfg) {
  InequalityReport rep{"summability"};
  double lhs = 0.0;
  double rhs = 0.0;
  for (const auto& r : trace.records) {
    lhs += r.gamma_k * r.Fx.squaredNorm();
    rhs += schedule_a(r.k, cfg);
    rep.add(r.k, lhs, rhs);
  }
  if (cfg.schedule != Schedule::custom) rep.add(trace.outer_iterations, lhs, 2.0 * cfg.b_bar);
  return rep;
}

/// <F(x), x - y> >= max(rho, sqrt(3) - 1) / beta_hi ||y - x||^2.
inline InequalityReport check_descent(const SolveTrace& trace, const LSConfig& cfg) {
  InequalityReport rep{"descent"};
  const double c = std::max(cfg.rho, std::sqrt(3.0) - 1.0) / cfg.beta_hi;
  for (const auto& r : trace.records) {
    const Point d = r.x - r.y;
    rep.add(r.k, c * d.squaredNorm(), r.Fx.dot(d));
  }
  return rep;
}

/// <F(z), x - z> > 0 whenever the halfspace step is taken.
inline InequalityReport check_separation(const SolveTrace& trace) {
  InequalityReport rep{"separation"};
  for (const auto& r : trace.records) {
    if (!r.x_next || !r.z) continue;
    rep.add(r.k, 0.0, r.F_second->dot(r.x - *r.z), 0.0);
  }
  return rep;
}

/// ||x+ - x*|| <= ||x - x*||.
inline InequalityReport check_fejer(const SolveTrace& trace, const Point& x_ref) {
  InequalityReport rep{"Fejer"};
  for (const auto& r : trace.records) {
    if (!r.x_next) continue;
    rep.add(r.k, (*r.x_next - x_ref).norm(), (r.x - x_ref).norm());
  }
  return rep;
}

/// ||x+ - x*||^2 <= ||x - x*||^2 - c lambda_k^2 ||F(z)||^2,
/// c = (gamma^2 - 4 gamma + 1) / (1 - gamma)^2.
inline InequalityReport check_halfspace_decrease(const SolveTrace& trace, const Point& x_ref, const LSConfig& cfg) {
  InequalityReport rep{"halfspace decrease"};
  const double g = cfg.gamma_bar;
  const double c = (g * g - 4.0 * g + 1.0) / ((1.0 - g) * (1.0 - g));
  for (const auto& r : trace.records) {
    if (!r.x_next || !r.lambda_k || !r.F_second) continue;
    const double lam = *r.lambda_k;
    rep.add(r.k, (*r.x_next - x_ref).squaredNorm(),
            (r.x - x_ref).squaredNorm() - c * lam * lam * r.F_second->squaredNorm());
  }
  return rep;
}

}  // namespace inexvi
