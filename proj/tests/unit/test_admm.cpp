#include "fogcache/admm.hpp"
#include "fogcache/baselines.hpp"
#include "fogcache/heuristic.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace fogcache {
namespace {

using testing::base_scenario;

// Plain gradient descent on the p-update subproblem, independent of the
// scalar reduction used by p_update.
Eigen::VectorXd subproblem_by_gradient_descent(const Eigen::VectorXd& z, const Eigen::VectorXd& theta,
                                               const Scenario& s, double rho) {
  const Eigen::VectorXd c = hit_weights(s.library, s.num_nodes());
  auto grad = [&](const Eigen::VectorXd& p) {
    const double h = testing::reference_echr(p, s);
    const double step = 1e-6;
    const double dd = (testing::reference_adt(h + step, s.traffic) - testing::reference_adt(h - step, s.traffic)) /
                      (2 * step);
    return Eigen::VectorXd(dd * c + rho * (p - z + theta));
  };
  Eigen::VectorXd p = z - theta;
  // Fixed step below 1/L for L = rho + max curvature·||c||^2 on the path.
  const double lr = 1.0 / (rho + 10.0 * c.squaredNorm());
  for (int k = 0; k < 200000; ++k) {
    const Eigen::VectorXd g = grad(p);
    p -= lr * g;
    if (g.norm() < 1e-11) break;
  }
  return p;
}

TEST(PUpdate, MatchesGradientDescentOracle) {
  const Scenario s = base_scenario();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(60);
  const Eigen::VectorXd p = p_update(zero, zero, s, 1.0);
  const Eigen::VectorXd oracle = subproblem_by_gradient_descent(zero, zero, s, 1.0);
  EXPECT_LT((p - oracle).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(PUpdate, MatchesOracleAtRandomPoints) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 5; ++t) {
    const Scenario s = testing::random_scenario(rng, 3, 6);
    Eigen::VectorXd z = testing::random_feasible(rng, s);
    Eigen::VectorXd theta = Eigen::VectorXd::Random(z.size()) * 0.3;
    const double rho = testing::uniform(rng, 0.05, 2.0);
    const Eigen::VectorXd p = p_update(z, theta, s, rho);
    ASSERT_LT((p - subproblem_by_gradient_descent(z, theta, s, rho)).lpNorm<Eigen::Infinity>(), 1e-7);
  }
}

TEST(PUpdate, LargeRhoReturnsShiftedZ) {
  const Scenario s = base_scenario();
  std::mt19937_64 rng(59);
  const Eigen::VectorXd z = testing::random_feasible(rng, s);
  const Eigen::VectorXd theta = Eigen::VectorXd::Random(60) * 0.1;
  EXPECT_LT((p_update(z, theta, s, 1e9) - (z - theta)).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(PUpdate, StationaryInputIsKept) {
  const Scenario s = base_scenario();
  const Eigen::VectorXd v = placement_from_echr(testing::kHCpl, s.library, s.cluster).flatten();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(60);
  EXPECT_LT((p_update(v, zero, s, 1.0) - v).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(PUpdate, RejectsBadArguments) {
  const Scenario s = base_scenario();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(60);
  EXPECT_THROW(p_update(zero, zero, s, 0.0), std::invalid_argument);
  EXPECT_THROW(p_update(Eigen::VectorXd::Zero(59), zero, s, 1.0), std::invalid_argument);
}

TEST(PUpdate, ScalarRootHandlesFarTargets) {
  // Targets far outside [0,1] push the root toward the stability limits.
  const Scenario s = base_scenario();
  const Eigen::VectorXd c = hit_weights(s.library, 3);
  for (double shift : {-50.0, 50.0}) {
    const Eigen::VectorXd z = Eigen::VectorXd::Constant(60, shift);
    const Eigen::VectorXd p = p_update(z, Eigen::VectorXd::Zero(60), s, 0.01);
    const double h = c.dot(p);
    const auto [lo, hi] = AdtCurve(s.traffic).domain();
    EXPECT_GT(h, lo);
    EXPECT_LT(h, hi);
  }
}

TEST(SolveAdmm, ReferenceScenarioReachesOptimum) {
  const Scenario s = base_scenario();
  const AdmmResult r = solve_admm(s);
  ASSERT_TRUE(r.state.converged);
  EXPECT_TRUE(is_feasible(r.placement, s.library, s.cluster, 1e-12));
  EXPECT_NEAR(overall_adt(r.placement, s).overall, testing::kDOpt, 1e-8);
  EXPECT_NEAR(echr(r.placement, s.library), testing::kHCpl, 1e-4);
  EXPECT_EQ(r.state.trace.size(), static_cast<std::size_t>(r.state.k));
  EXPECT_LE(r.state.primal_residual, std::sqrt(60.0) * 1e-6 + 1e-4 * std::max(r.state.p.norm(), r.state.z.norm()));
}

TEST(SolveAdmm, FastInitialDescentOnReferenceScenario) {
  const Scenario s = base_scenario();
  const AdmmResult r = solve_admm(s);
  ASSERT_GE(r.state.trace.size(), 5u);
  const double final_obj = r.state.trace.back().objective;
  EXPECT_LE(r.state.trace[4].objective, 1.01 * final_obj);
}

TEST(SolveAdmm, MatchesProjectedGradient) {
  const Scenario s = base_scenario();
  const double admm = overall_adt(solve_admm(s).placement, s).overall;
  const double pgd = overall_adt(projected_gradient_solve(s).placement, s).overall;
  EXPECT_NEAR(admm, pgd, 1e-6);
}

TEST(SolveAdmm, LargeCapacityReachesStationaryHitRatio) {
  const Scenario s = homogeneous_scenario(20, 0.6, {20.0, 20.0, 20.0}, 4.0, 8.0, 6.0);
  const AdmmResult r = solve_admm(s);
  ASSERT_TRUE(r.state.converged);
  EXPECT_NEAR(echr(r.placement, s.library), echr_cpl(s.traffic), 1e-4);
}

TEST(SolveAdmm, OptimumIndependentOfStart) {
  const Scenario s = base_scenario();
  AdmmConfig config;
  config.eps_abs = 1e-9;
  config.eps_rel = 1e-9;
  std::mt19937_64 rng(61);
  const double reference = overall_adt(solve_admm(s, config).placement, s).overall;
  const double reference_h = echr(solve_admm(s, config).placement, s.library);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd p0 = testing::random_feasible(rng, s);
    const AdmmResult r = solve_admm(s, config, p0);
    ASSERT_TRUE(r.state.converged);
    ASSERT_NEAR(overall_adt(r.placement, s).overall, reference, 1e-6);
    ASSERT_NEAR(echr(r.placement, s.library), reference_h, 1e-6);
  }
}

TEST(SolveAdmm, TraceEventuallyNonIncreasing) {
  const Scenario s = base_scenario(3.0);  // optimum on the capacity boundary
  AdmmConfig config;
  config.eps_rel = 1e-8;
  const AdmmResult r = solve_admm(s, config);
  ASSERT_TRUE(r.state.converged);
  const auto& trace = r.state.trace;
  const std::size_t tail = trace.size() / 2;
  for (std::size_t k = tail + 1; k < trace.size(); ++k) {
    ASSERT_LE(trace[k].objective, trace[k - 1].objective + 1e-9) << "k=" << k;
  }
}

TEST(SolveAdmm, IterationCapReturnsBestIterate) {
  const Scenario s = base_scenario();
  AdmmConfig config;
  config.max_iter = 3;
  const AdmmResult r = solve_admm(s, config);
  EXPECT_FALSE(r.state.converged);
  EXPECT_EQ(r.state.k, 3);
  double best = 1e9;
  for (const auto& rec : r.state.trace) best = std::min(best, rec.objective);
  EXPECT_DOUBLE_EQ(overall_adt(r.placement, s).overall, best);
  EXPECT_TRUE(is_feasible(r.placement, s.library, s.cluster));
}

TEST(SolveAdmm, RejectsInvalidConfigAndStart) {
  const Scenario s = base_scenario();
  AdmmConfig bad;
  bad.rho = 0.0;
  EXPECT_THROW(solve_admm(s, bad), std::invalid_argument);
  bad = AdmmConfig{};
  bad.max_iter = 0;
  EXPECT_THROW(solve_admm(s, bad), std::invalid_argument);
  EXPECT_THROW(solve_admm(s, {}, Eigen::VectorXd::Ones(60)), std::invalid_argument);
}

}  // namespace
}  // namespace fogcache
