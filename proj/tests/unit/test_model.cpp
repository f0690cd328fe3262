#include "fogcache/model.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

namespace fogcache {
namespace {

using testing::kPop1;
using testing::kZipfNorm20;

TEST(ZipfPopularity, SingleContentIsCertain) {
  const auto pr = zipf_popularity(1, 0.6);
  ASSERT_EQ(pr.size(), 1u);
  EXPECT_DOUBLE_EQ(pr[0], 1.0);
}

TEST(ZipfPopularity, ZeroExponentIsUniform) {
  const auto pr = zipf_popularity(2, 0.0);
  EXPECT_DOUBLE_EQ(pr[0], 0.5);
  EXPECT_DOUBLE_EQ(pr[1], 0.5);
}

TEST(ZipfPopularity, MatchesDirectSummation) {
  const auto pr = zipf_popularity(20, 0.6);
  EXPECT_NEAR(pr[0], kPop1, 1e-15);
  EXPECT_NEAR(pr[0], 1.0 / kZipfNorm20, 1e-15);
  EXPECT_NEAR(pr[19], std::pow(20.0, -0.6) / kZipfNorm20, 1e-15);
}

TEST(ZipfPopularity, RejectsBadArguments) {
  EXPECT_THROW(zipf_popularity(0, 0.6), std::invalid_argument);
  EXPECT_THROW(zipf_popularity(-3, 0.6), std::invalid_argument);
  EXPECT_THROW(zipf_popularity(5, -0.1), std::invalid_argument);
}

TEST(ZipfPopularity, SumsToOneAndDescendsOverRange) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int f = testing::uniform_int(rng, 1, 10000);
    const double alpha = testing::uniform(rng, 0.0, 2.0);
    const auto pr = zipf_popularity(f, alpha);
    const double sum = std::accumulate(pr.begin(), pr.end(), 0.0);
    ASSERT_NEAR(sum, 1.0, 1e-12) << "F=" << f << " alpha=" << alpha;
    ASSERT_TRUE(std::is_sorted(pr.rbegin(), pr.rend()));
  }
}

TEST(RatesFromLinkSpeeds, ReferenceLinks) {
  const auto r = rates_from_link_speeds(1.0, 8.0, 24.0);
  EXPECT_DOUBLE_EQ(r.mu_e, 8.0);
  EXPECT_NEAR(r.mu_b, 6.0, 1e-14);

  const auto half = rates_from_link_speeds(2.0, 8.0, 24.0);
  EXPECT_DOUBLE_EQ(half.mu_e, 4.0);
  EXPECT_NEAR(half.mu_b, 3.0, 1e-14);
}

TEST(RatesFromLinkSpeeds, InfiniteBackhaulApproachesEdgeRate) {
  const auto inf = rates_from_link_speeds(1.0, 8.0, std::numeric_limits<double>::infinity());
  EXPECT_DOUBLE_EQ(inf.mu_b, 8.0);
  const auto fast = rates_from_link_speeds(1.0, 8.0, 1e9);
  EXPECT_LT(fast.mu_b, fast.mu_e);
  EXPECT_NEAR(fast.mu_b, 8.0, 1e-6);
}

TEST(RatesFromLinkSpeeds, RejectsNonPositive) {
  EXPECT_THROW(rates_from_link_speeds(0.0, 8.0, 24.0), std::invalid_argument);
  EXPECT_THROW(rates_from_link_speeds(1.0, -8.0, 24.0), std::invalid_argument);
  EXPECT_THROW(rates_from_link_speeds(1.0, 8.0, 0.0), std::invalid_argument);
}

TEST(ValidateScenario, ReferenceScenarioIsValid) {
  EXPECT_NO_THROW(testing::base_scenario());
}

TEST(ValidateScenario, StabilityBoundary) {
  Scenario s = testing::base_scenario();
  s.traffic.lambda[1] = 6.0;
  try {
    validate_scenario(s);
    FAIL() << "expected stability violation";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("BS 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("stability violated"), std::string::npos) << e.what();
  }
  s.traffic.lambda[1] = 4.0;
  s.traffic.mu_b[0] = 8.0;  // μ_b = μ_e
  EXPECT_THROW(validate_scenario(s), std::invalid_argument);
}

TEST(ValidateScenario, PopularityMustDescend) {
  Scenario s = testing::base_scenario();
  s.library.sizes = {1.0, 1.0};
  s.library.popularity = {0.4, 0.6};
  try {
    validate_scenario(s);
    FAIL() << "expected ordering violation";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("not popularity-descending"), std::string::npos) << e.what();
  }
}

TEST(ValidateScenario, OtherInvariants) {
  Scenario s = testing::base_scenario();
  s.library.popularity[0] += 1e-9;
  EXPECT_THROW(validate_scenario(s), std::invalid_argument) << "sum off by 1e-9";

  s = testing::base_scenario();
  s.library.sizes[3] = 0.0;
  EXPECT_THROW(validate_scenario(s), std::invalid_argument);

  s = testing::base_scenario();
  s.cluster.capacities[2] = -1.0;
  EXPECT_THROW(validate_scenario(s), std::invalid_argument);

  s = testing::base_scenario();
  s.traffic.mu_e.pop_back();
  EXPECT_THROW(validate_scenario(s), std::invalid_argument);

  s = testing::base_scenario();
  s.cluster.capacities = {0.0, 0.0, 2.5};  // fractional and zero capacities are fine
  EXPECT_NO_THROW(validate_scenario(s));
}

TEST(Placement, FlattenIsNodeMajor) {
  Placement one(1, 1);
  one(0, 0) = 0.5;
  EXPECT_EQ(one.flatten(), Eigen::VectorXd::Constant(1, 0.5));

  Eigen::MatrixXd m(2, 2);
  m << 0.1, 0.2, 0.3, 0.4;
  const Eigen::VectorXd p = Placement(m).flatten();
  EXPECT_EQ(p, (Eigen::VectorXd(4) << 0.1, 0.2, 0.3, 0.4).finished());
  EXPECT_EQ(flat_index(1, 0, 2), 2u);
}

TEST(Placement, UnflattenChecksLength) {
  EXPECT_THROW(Placement::from_vector(Eigen::VectorXd::Zero(5), 2, 2), std::invalid_argument);
}

TEST(Placement, FlattenRoundTripOnRandomShapes) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(testing::uniform_int(rng, 1, 6));
    const auto f = static_cast<std::size_t>(testing::uniform_int(rng, 1, 30));
    Eigen::MatrixXd m = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
    const Placement p(m);
    const Eigen::VectorXd v = p.flatten();
    ASSERT_EQ(Placement::from_vector(v, n, f), p);
    ASSERT_EQ(Placement::from_vector(v, n, f).flatten(), v);
  }
}

TEST(Placement, FeasibilityCheckerBoundsAndPerturbations) {
  // Build placements with every constraint exactly tight, then push each
  // bound 1e-6 past its limit.
  const Scenario s = testing::base_scenario();
  Placement tight(3, 20);
  tight(0, 0) = 1.0;  // content 1 fully at node 1 (box and content row tight)
  tight(0, 1) = 1.0;  // node 1 full: 2 units
  for (std::size_t f = 2; f < 5; ++f) tight(1, f) = 1.0;  // node 2 full
  for (std::size_t f = 5; f < 10; ++f) tight(2, f) = 1.0;
  EXPECT_TRUE(is_feasible(tight, s.library, s.cluster));

  Placement within = tight;
  within(2, 9) += 5e-9;  // inside the 1e-8 tolerance
  EXPECT_TRUE(is_feasible(within, s.library, s.cluster));

  Placement over_box = tight;
  over_box(0, 0) = 1.0 + 1e-6;
  EXPECT_FALSE(is_feasible(over_box, s.library, s.cluster));

  Placement under_box(3, 20);
  under_box(1, 12) = -1e-6;
  EXPECT_FALSE(is_feasible(under_box, s.library, s.cluster));

  Placement over_content(3, 20);
  over_content(0, 15) = 0.5;
  over_content(1, 15) = 0.5 + 1e-6;
  EXPECT_FALSE(is_feasible(over_content, s.library, s.cluster));

  Placement over_node = tight;
  over_node(1, 19) = 1e-6;
  EXPECT_FALSE(is_feasible(over_node, s.library, s.cluster));
  EXPECT_NE(placement_violation(over_node, s.library, s.cluster).find("node 2"), std::string::npos);

  EXPECT_FALSE(is_feasible(Placement(2, 20), s.library, s.cluster));
}

}  // namespace
}  // namespace fogcache
