#pragma once

// Independent reference routines used to validate the solvers: closed-form
// projections, a bisection projector onto p-balls and a sampling VI check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "inexvi/core.hpp"

namespace inexvi {

inline Point euclidean_ball_project(const Point& v) {
  const double n = v.norm();
  return n <= 1.0 ? Point(v) : Point(v / n);
}

/// Projection onto {w : <normal, w - anchor> <= 0}.
inline Point halfspace_project(const Point& x, const Point& normal, const Point& anchor) {
  require_same_dim(x, normal, "halfspace_project");
  require_same_dim(x, anchor, "halfspace_project");
  const double n2 = normal.squaredNorm();
  if (!(n2 > 0.0)) throw UsageError("halfspace_project: zero normal");
  const double s = normal.dot(x - anchor);
  if (s <= 0.0) return x;
  return x - (s / n2) * normal;
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw; unlike
/// std::uniform_real_distribution the stream is identical across standard
/// libraries.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace detail {

/// Half-width of an axis box containing the set, from the LO oracle.
template <FeasibleRegion S>
Point bounding_half_width(const S& set) {
  const int d = set.dim();
  Point lo(d);
  Point hi(d);
  for (int i = 0; i < d; ++i) {
    Point e = Point::Zero(d);
    e[i] = 1.0;
    lo[i] = set.lo_oracle(e)[i];
    hi[i] = set.lo_oracle(-e)[i];
  }
  return hi.cwiseMax(-lo);
}

}  // namespace detail

/// min over sampled feasible y of <F(x), y - x>. The samples are the LO
/// answers for the +-e_i costs plus `samples` points drawn uniformly from the
/// set's bounding box and accepted when feasible, from a fixed seed.
template <FeasibleRegion S>
double brute_force_vi_check(const Point& x, const VectorField& F, const S& set, int samples,
                            std::uint64_t seed = 0x5eed) {
  if (x.size() != set.dim()) throw UsageError("brute_force_vi_check: dimension mismatch");
  if (samples < 0) throw UsageError("brute_force_vi_check: samples must be >= 0");
  const int d = set.dim();
  const Point fx = F(x);
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const Point& y) { best = std::min(best, fx.dot(y - x)); };

  for (int i = 0; i < d; ++i) {
    Point e = Point::Zero(d);
    e[i] = 1.0;
    consider(set.lo_oracle(e));
    consider(set.lo_oracle(-e));
  }
  const Point half = detail::bounding_half_width(set);
  std::mt19937_64 rng(seed);
  int accepted = 0;
  // Rejection sampling gets rare in high dimension; cap the attempts.
  const std::int64_t max_attempts = 1000LL * std::max(samples, 1);
  for (std::int64_t attempt = 0; accepted < samples && attempt < max_attempts; ++attempt) {
    Point y(d);
    for (int i = 0; i < d; ++i) y[i] = (2.0 * unit_uniform(rng) - 1.0) * half[i];
    if (!set.contains(y, 0.0)) continue;
    ++accepted;
    consider(y);
  }
  return best;
}

namespace detail {

/// Solves t + c t^{p-1} = a for t in [0, a] (a >= 0, c >= 0) by bisection.
inline double solve_coordinate(double a, double c, double p) {
  double lo = 0.0;
  double hi = a;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (mid + c * std::pow(mid, p - 1.0) > a) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Euclidean projection onto the unit p-ball by bisection on the multiplier
/// mu of the constraint: y_i + mu p sign(y_i) |y_i|^{p-1} = v_i.
inline Point reference_pnorm_project(const Point& v, double p) {
  if (!(p > 1.0)) throw UsageError("reference_pnorm_project: p must be > 1");
  if (pnorm(v, p) <= 1.0) return v;
  auto y_of = [&](double mu) {
    Point y(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      y[i] = std::copysign(detail::solve_coordinate(std::abs(v[i]), mu * p, p), v[i]);
    }
    return y;
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; pnorm(y_of(hi), p) > 1.0; ++it) {
    if (it > 2000) throw SolverError("reference_pnorm_project: failed to bracket the multiplier");
    lo = hi;
    hi *= 2.0;
  }
  Point y = y_of(hi);
  for (int it = 0; it < 500; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    y = y_of(mid);
    const double n = pnorm(y, p);
    // Accept only from the feasible side so the result passes contains().
    if (n <= 1.0 && 1.0 - n <= 1e-10) return y;
    if (n > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return y_of(hi);
}

}  // namespace inexvi
