#pragma once

#include "inexvi/core.hpp"
#include "inexvi/fw_projection.hpp"

namespace inexvi {

/// Natural residual ||x - P_C(x - F(x))||, with the projection computed by
/// Frank-Wolfe at gamma = 0 down to an absolute gap of `proj_tol`. Vanishes
/// exactly at solutions of VIP(F, C).
template <FeasibleRegion S>
double natural_residual(const Point& x, const VectorField& field, const S& set,
                        double proj_tol = 1e-12, std::int64_t max_iter = 10'000'000) {
  FWConfig cfg;
  cfg.gamma = 0.0;
  cfg.abs_gap_floor = proj_tol;
  cfg.max_iter = max_iter;
  const FWResult p = fw_project(x, x - field(x), set, cfg);
  return (x - p.w).norm();
}

}  // namespace inexvi
