#include <gtest/gtest.h>

#include "inexvi/diagnostics.hpp"
#include "inexvi/experiments.hpp"

using namespace inexvi;

TEST(InequalityReport, Bookkeeping) {
  InequalityReport rep{"demo"};
  rep.add(1, 1.0, 2.0);
  rep.add(2, 2.0, 2.0 - 1e-9);
  EXPECT_TRUE(rep.holds());
  rep.add(3, 3.0, 2.0);
  rep.add(4, 2.5, 2.0);
  EXPECT_FALSE(rep.holds());
  EXPECT_EQ(rep.checked, 4);
  EXPECT_EQ(rep.violations, 2);
  EXPECT_EQ(rep.first_violation_k, 3);
  EXPECT_EQ(rep.worst_k, 3);
  EXPECT_DOUBLE_EQ(rep.worst_excess, 1.0);
}

TEST(Diagnostics, DetectTamperedTrace) {
  const auto prob = figure3_problem();
  const auto cfg = figure3_config();
  auto trace = einexpm_solve(prob, cfg);
  ASSERT_TRUE(check_quasi_fejer(trace, *prob.x_ref, cfg).holds());
  ASSERT_TRUE(check_step_bounds(trace).holds());
  ASSERT_TRUE(check_feasibility(trace, prob.set).holds());
  trace.records[3].x_next = Point::Constant(5, 3.0);
  EXPECT_FALSE(check_quasi_fejer(trace, *prob.x_ref, cfg).holds());
  EXPECT_FALSE(check_step_bounds(trace).holds());
  EXPECT_FALSE(check_feasibility(trace, prob.set).holds());
  trace.records[2].certificate_violation = 1e-3;
  EXPECT_EQ(check_certificates(trace).first_violation_k, 3);
  trace.records[0].gamma_k = 0.29;
  EXPECT_FALSE(check_summability(trace, cfg).holds());
}

TEST(Diagnostics, DescentAndSeparationOnLineSearchRun) {
  const auto prob = figure3_problem();
  const auto cfg = figure3_ls_config();
  const auto trace = einexpmls_solve(prob, cfg);
  EXPECT_TRUE(check_descent(trace, cfg).holds());
  EXPECT_TRUE(check_separation(trace).holds());
  EXPECT_TRUE(check_fejer(trace, *prob.x_ref).holds());
  EXPECT_TRUE(check_halfspace_decrease(trace, *prob.x_ref, cfg).holds());
}
