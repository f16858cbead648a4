#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "inexvi/diagnostics.hpp"
#include "inexvi/experiments.hpp"
#include "inexvi/extragradient.hpp"
#include "inexvi/oracles.hpp"

using namespace inexvi;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

}  // namespace

TEST(GammaSchedule, HarmonicValues) {
  EInexPMConfig cfg;
  cfg.gamma_bar = 0.4;
  EXPECT_DOUBLE_EQ(schedule_a(1, cfg), 1.0);
  EXPECT_DOUBLE_EQ(gamma_schedule(1, 0.0, cfg), 0.999 * 0.4);
  EXPECT_DOUBLE_EQ(gamma_schedule(3, 10.0, cfg), (0.5 - 1.0 / 3.0) / 10.0);
  EXPECT_NEAR(gamma_schedule(3, 10.0, cfg), 1.0 / 60.0, 1e-17);
  cfg.gamma_bar = 0.01;
  EXPECT_DOUBLE_EQ(gamma_schedule(3, 10.0, cfg), 0.999 * 0.01);
  EXPECT_THROW(gamma_schedule(0, 1.0, cfg), UsageError);
  EXPECT_THROW(gamma_schedule(1, -1.0, cfg), UsageError);
}

TEST(GammaSchedule, LogAndCustomAreSummable) {
  EInexPMConfig cfg;
  cfg.schedule = Schedule::log;
  cfg.b_bar = 2.0;
  double sum = 0.0;
  for (int k = 1; k <= 10'000; ++k) {
    const double a = schedule_a(k, cfg);
    ASSERT_GT(a, 0.0);
    sum += a;
  }
  EXPECT_NEAR(sum, 4.0 - 2.0 / std::log(10'001.0), 1e-9);
  cfg.schedule = Schedule::custom;
  cfg.custom_a = [](int k) { return std::pow(0.5, k); };
  EXPECT_DOUBLE_EQ(schedule_a(3, cfg), 0.125);
  cfg.custom_a = {};
  EXPECT_THROW(cfg.validate(), UsageError);
}

TEST(EInexPMConfig, Validation) {
  EInexPMConfig cfg;
  cfg.gamma_bar = 0.5;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg.gamma_bar = 0.2;
  cfg.alpha = 0.0;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg.alpha = 0.3;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_NEAR(cfg.eta_bar(1.0), 1 - 0.09 - 0.4, 1e-15);
  EXPECT_NEAR(cfg.nu_bar(1.0), 0.09 * 1.1 * 1.1 / std::pow(0.8, 4), 1e-15);
}

TEST(EInexPM, SolutionIsFixedPoint) {
  const auto prob = th_operator(5, 10, 0.6);
  EInexPMConfig cfg;
  cfg.alpha = 0.5;
  const auto rec = einexpm_step(*prob.x_ref, 1, prob.field, prob.set, cfg);
  EXPECT_LE(rec.displacement, cfg.outer_tol);
  const auto trace = einexpm_solve(prob, cfg, *prob.x_ref);
  EXPECT_EQ(trace.status, Status::converged);
  EXPECT_EQ(trace.outer_iterations, 1);
}

TEST(EInexPM, ZeroOperatorStopsAtFirstIterate) {
  const auto prob = zero_operator(3);
  const auto trace = einexpm_solve(prob, EInexPMConfig{});
  EXPECT_EQ(trace.status, Status::converged);
  EXPECT_EQ(trace.outer_iterations, 1);
  EXPECT_EQ(trace.x_final, prob.x_start);
}

TEST(EInexPM, LinearSaddleOuterSteps) {
  const auto prob = linear_saddle_operator();
  const auto a = einexpm_solve(prob, table1_config(0.21, 0.106));
  EXPECT_EQ(a.status, Status::converged);
  EXPECT_NEAR(a.outer_iterations, 11, 2);
  const auto b = einexpm_solve(prob, table1_config(0.41, 0.106));
  EXPECT_NEAR(b.outer_iterations, 9, 2);
  EXPECT_GE(b.fw_total, 11);
  EXPECT_LE(b.fw_total, 1130);
  EXPECT_EQ(b.fw_total, b.fw_sum());
}

TEST(EInexPM, LiteralRuleStopsNoLaterThanDisplacement) {
  const auto prob = linear_saddle_operator();
  EInexPMConfig cfg = table1_config(0.11, 0.106);
  const auto literal = einexpm_solve(prob, cfg);
  cfg.stop = StopRule::displacement;
  const auto displacement = einexpm_solve(prob, cfg);
  EXPECT_EQ(displacement.status, Status::converged);
  EXPECT_LE(literal.outer_iterations, displacement.outer_iterations);
}

TEST(EInexPM, Deterministic) {
  const auto prob = figure3_problem();
  const auto a = einexpm_solve(prob, figure3_config());
  const auto b = einexpm_solve(prob, figure3_config());
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].x, b.records[i].x);
    EXPECT_EQ(a.records[i].y, b.records[i].y);
    EXPECT_EQ(a.records[i].fw_iters_y, b.records[i].fw_iters_y);
  }
}

TEST(EInexPM, FirstDistanceToReference) {
  const auto trace = einexpm_solve(figure3_problem(), figure3_config());
  EXPECT_NEAR(*trace.records.front().dist_to_ref, 1.6432711801397482, 1e-12);
}

TEST(EInexPM, WarnsOutsideStepCondition) {
  const auto prob = linear_saddle_operator();
  EInexPMConfig cfg;
  cfg.alpha = 0.8;
  cfg.gamma_bar = 0.1;
  cfg.max_outer = 5;
  const auto trace = einexpm_solve(prob, cfg);
  ASSERT_FALSE(trace.warnings.empty());
  EXPECT_NE(trace.warnings.front().find("not guaranteed"), std::string::npos);
  cfg.alpha = 0.3;
  EXPECT_TRUE(einexpm_solve(prob, cfg).warnings.empty());
}

TEST(EInexPM, MaxOuterAndStall) {
  const auto prob = linear_saddle_operator();
  EInexPMConfig cfg;
  cfg.max_outer = 3;
  const auto capped = einexpm_solve(prob, cfg);
  EXPECT_EQ(capped.status, Status::max_outer);
  EXPECT_EQ(capped.outer_iterations, 3);
  cfg.fw.max_iter = 1;
  cfg.fw.abs_gap_floor = 0.0;
  const auto stalled = einexpm_solve(prob, cfg);
  EXPECT_EQ(stalled.status, Status::stalled);
  ASSERT_EQ(stalled.records.size(), 1U);
  EXPECT_FALSE(stalled.warnings.empty());
}

TEST(EInexPM, RejectsInfeasibleStart) {
  const auto prob = linear_saddle_operator();
  EXPECT_THROW(einexpm_solve(prob, EInexPMConfig{}, pt({2, 0})), UsageError);
}

TEST(EInexPM, CertificatesAndFeasibility) {
  const auto prob = linear_saddle_operator();
  EInexPMConfig cfg;
  cfg.alpha = 0.3;
  cfg.gamma_bar = 0.2;
  const auto trace = einexpm_solve(prob, cfg);
  EXPECT_EQ(trace.status, Status::converged);
  EXPECT_TRUE(check_certificates(trace).holds());
  EXPECT_TRUE(check_feasibility(trace, prob.set).holds());
  EXPECT_TRUE(check_step_bounds(trace).holds());
  EXPECT_TRUE(check_summability(trace, cfg).holds());
}

TEST(Armijo, ConstantOperatorAcceptsFirstTrial) {
  const VectorField f(2, [](const Point&) { return pt({1, 2}); });
  LSConfig cfg;
  const Point x = pt({0, 0});
  const Point y = pt({-0.3, -0.1});
  const auto r = armijo_search(x, y, f, cfg);
  EXPECT_EQ(r.i_k, 0);
  EXPECT_EQ(r.z, x + cfg.sigma * (y - x));
  EXPECT_THROW(armijo_search(x, x, f, cfg), UsageError);
}

TEST(Armijo, AcceptedPointSatisfiesCondition) {
  const auto prob = nonlipschitz_operator();
  LSConfig cfg;
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const Point x = (0.5 + 0.5 * unit_uniform(rng)) * prob.set.lo_oracle(pt({-1, -unit_uniform(rng)}));
    const Point fx = prob.field(x);
    const Point y = fw_project(x, x - fx, prob.set, FWConfig{}).w;
    if ((y - x).norm() == 0.0) continue;
    const auto r = armijo_search(x, y, prob.field, cfg);
    EXPECT_LE(prob.field(r.z).dot(y - x), cfg.rho * fx.dot(y - x));
  }
}

TEST(Armijo, FailsLoudly) {
  // F flips sign away from x, so no trial point along y - x is accepted.
  const VectorField f(1, [](const Point& x) { return Point::Constant(1, x[0] < 0 ? -1.0 : 1.0); });
  LSConfig cfg;
  cfg.max_backtracks = 5;
  EXPECT_THROW(armijo_search(pt({0.0}), pt({-1.0}), f, cfg), SolverError);
}

TEST(HalfspaceStep, Values) {
  EXPECT_DOUBLE_EQ(halfspace_stepsize(pt({0.5, 0}), pt({0, 0}), pt({1, 0})), 0.5);
  const Point x = pt({1, 1});
  const Point fz = pt({0, 2});
  const double lam = halfspace_stepsize(x, pt({3, 1}), fz);
  EXPECT_EQ(lam, 0.0);
  EXPECT_EQ(x - lam * fz, x);
  EXPECT_THROW(halfspace_stepsize(x, x, pt({0, 0})), SolverError);
}

TEST(HalfspaceStep, EqualsHalfspaceProjection) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    Point x(4), z(4), fz(4);
    for (int i = 0; i < 4; ++i) {
      x[i] = 4 * unit_uniform(rng) - 2;
      z[i] = 4 * unit_uniform(rng) - 2;
      fz[i] = 4 * unit_uniform(rng) - 2;
    }
    if (fz.dot(x - z) <= 0) fz = -fz;
    const double lam = halfspace_stepsize(x, z, fz);
    EXPECT_GT(lam, 0.0);
    EXPECT_LE((x - lam * fz - halfspace_project(x, fz, z)).norm(), 1e-12);
  }
}

TEST(LSConfig, Validation) {
  LSConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.gamma_bar = 0.27;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg.gamma_bar = 0.1;
  cfg.rho = 0.95;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg.rho = 0.5;
  cfg.sigma = 1.0;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg.sigma = 0.5;
  cfg.beta_lo = 2.0;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg.beta_lo = 0.5;
  cfg.beta_hi = 2.0;
  cfg.beta_rule = [](int k) { return k % 2 ? 0.5 : 2.0; };
  EXPECT_EQ(cfg.beta(1), 0.5);
  EXPECT_EQ(cfg.beta(2), 2.0);
  cfg.beta_rule = [](int) { return 3.0; };
  EXPECT_THROW(cfg.beta(1), UsageError);
}

TEST(EInexPMLS, SolutionSignalsConvergence) {
  const auto prob = nonlipschitz_operator();
  LSSignal sig = LSSignal::proceed;
  const auto rec = einexpmls_step(*prob.x_ref, 1, prob.field, prob.set, LSConfig{}, &sig);
  EXPECT_EQ(sig, LSSignal::small_displacement);
  EXPECT_FALSE(rec.x_next.has_value());
}

TEST(EInexPMLS, ZeroOperator) {
  const auto trace = einexpmls_solve(zero_operator(), LSConfig{});
  EXPECT_EQ(trace.status, Status::converged);
  EXPECT_EQ(trace.outer_iterations, 1);
}

TEST(EInexPMLS, NonLipschitzConverges) {
  const auto prob = nonlipschitz_operator();
  LSConfig cfg;
  cfg.stop = StopRule::reference;
  cfg.outer_tol = 1e-2;
  const auto trace = einexpmls_solve(prob, cfg);
  EXPECT_EQ(trace.status, Status::converged);
  EXPECT_LE((trace.x_final - *prob.x_ref).norm(), 1e-2);
  for (const auto& r : trace.records) {
    ASSERT_TRUE(r.i_k.has_value());
    const double t = 0.5 * (r.x[0] + std::sqrt(r.x[0] * r.x[0] + 4 * r.x[1]));
    EXPECT_GE(r.x[0] * r.x[0] + 4 * r.x[1], 0.0);
    EXPECT_GT(t, 0.0);
  }
  EXPECT_TRUE(check_fejer(trace, *prob.x_ref).holds());
  EXPECT_TRUE(check_halfspace_decrease(trace, *prob.x_ref, cfg).holds());
  EXPECT_TRUE(check_separation(trace).holds());
  EXPECT_TRUE(check_descent(trace, cfg).holds());
  EXPECT_TRUE(check_step_bounds(trace).holds());
  EXPECT_TRUE(check_certificates(trace).holds());
  EXPECT_TRUE(check_feasibility(trace, prob.set).holds());
}

TEST(EInexPMLS, ThTrajectoryStaysInPositiveSum) {
  const auto prob = th_operator(10, 15, 0.2);
  LSConfig cfg = table3_config();
  cfg.check_certificates = true;
  const auto trace = einexpmls_solve(prob, cfg);
  EXPECT_EQ(trace.status, Status::converged);
  for (const auto& r : trace.records) ASSERT_GT(r.x.sum(), 0.0);
  EXPECT_TRUE(check_fejer(trace, *prob.x_ref).holds());
  EXPECT_TRUE(check_certificates(trace).holds());
}

TEST(EInexPMLS, ReferenceRuleNeedsReference) {
  LSConfig cfg;
  cfg.stop = StopRule::reference;
  EXPECT_THROW(einexpmls_solve(linear_saddle_operator(), cfg), UsageError);
}
