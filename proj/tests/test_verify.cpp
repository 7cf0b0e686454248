#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "membrane/fixtures.hpp"
#include "membrane/membrane.hpp"
#include "oracles.hpp"

using namespace membrane;
using oracle::bessel_j;
using oracle::bessel_p;
using oracle::pi;

namespace {

VerificationReport<double> synthetic(double lambda1, double mu1, double mu2, double area, int degree) {
  VerificationReport<double> r;
  r.lambda1 = lambda1;
  r.mu1 = mu1;
  r.mu2 = mu2;
  r.area = area;
  r.degree = degree;
  r.rhs2 = 3 / (4 * pi * degree);
  r.reciprocal_sum = 1 / lambda1 + 1 / mu1 + 1 / mu2;
  r.lhs2 = r.reciprocal_sum / area;
  r.slack2 = r.lhs2 - r.rhs2;
  const auto e = verify_eq3(r);
  r.lhs3 = e.lhs;
  r.rhs3 = e.rhs;
  r.slack3 = e.slack;
  return r;
}

}  // namespace

TEST(ProductBound, HemisphereEqualityValues) {
  const auto e = verify_eq3(synthetic(2, 2, 2, 2 * pi, 1));
  EXPECT_NEAR(e.lhs, 8 * pi, 1e-13);
  EXPECT_NEAR(e.rhs, 8 * pi, 1e-13);
  EXPECT_NEAR(e.slack, 0.0, 1e-13);
}

TEST(ProductBound, DiscBesselValues) {
  const double j2 = bessel_j * bessel_j, p2 = bessel_p * bessel_p;
  const auto e = verify_eq3(synthetic(j2, p2, p2, pi, 1));
  EXPECT_NEAR(e.lhs, 61.59, 5e-3);
  EXPECT_NEAR(e.rhs, 62.65, 5e-3);
  EXPECT_NEAR(e.slack, 1.06, 5e-3);
}

TEST(ProductBound, ImpliedByReciprocalSumBound) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.1, 10);
  int implied = 0;
  for (int i = 0; i < 5000; ++i) {
    double mu1 = u(rng), mu2 = u(rng);
    if (mu1 > mu2) std::swap(mu1, mu2);
    const auto r = synthetic(u(rng), mu1, mu2, u(rng), 1 + i % 3);
    EXPECT_TRUE(eq3_implied_by_eq2(r));
    if (r.slack2 >= 0) {
      ++implied;
      EXPECT_GE(r.slack3, -1e-12 * r.rhs3);
    }
  }
  EXPECT_GT(implied, 100);
}

TEST(VerifyInequality, HemisphereIsTheEqualityCase) {
  const auto s = hemisphere_fixture().make(24);
  const auto r = verify_inequality(s.mesh, s.map);
  ASSERT_FALSE(r.failed) << r.failure;
  EXPECT_NEAR(r.lambda1, 2.0, 1e-2);
  EXPECT_NEAR(r.mu1, 2.0, 1e-2);
  EXPECT_NEAR(r.mu2, 2.0, 1e-2);
  EXPECT_EQ(r.degree, 1);
  EXPECT_NEAR(r.rhs2, 3 / (4 * pi), 1e-15);
  EXPECT_LT(std::abs(r.slack2) / r.rhs2, 1e-2);
  EXPECT_LT(std::abs(r.slack3) / r.rhs3, 1e-2);
  EXPECT_NEAR(r.trial_sum, 1.5, 1e-2);
}

TEST(VerifyInequality, HemisphereSlackShrinksUnderRefinement) {
  double prev = 1e300;
  for (int rings : {4, 8, 16}) {
    const auto s = hemisphere_fixture().make(rings);
    const double slack = std::abs(verify_inequality(s.mesh, s.map).slack2);
    EXPECT_LT(slack, prev);
    prev = slack;
  }
}

TEST(VerifyInequality, FlatDiscMatchesBesselConstants) {
  const double lhs2 = (1 / (bessel_j * bessel_j) + 2 / (bessel_p * bessel_p)) / pi;
  EXPECT_NEAR(lhs2, 0.24283, 1e-5);
  const auto s = disc_fixture().make(24);
  const auto r = verify_inequality(s.mesh, s.map);
  ASSERT_FALSE(r.failed) << r.failure;
  EXPECT_NEAR(r.lhs2 / lhs2, 1.0, 2e-3);
  EXPECT_NEAR(r.slack2, lhs2 - 3 / (4 * pi), 5e-4);
  EXPECT_GT(r.slack2, 0);
  EXPECT_GT(r.slack3, 0);
  EXPECT_TRUE(eq3_implied_by_eq2(r));
}

TEST(VerifyInequality, BranchedDoubleDiscHasPositiveSlackAtTwoResolutions) {
  const auto coarse_s = branched_disc_fixture().make(8);
  const auto fine_s = branched_disc_fixture().make(16);
  const auto coarse = verify_inequality(coarse_s.mesh, coarse_s.map);
  const auto fine = verify_inequality(fine_s.mesh, fine_s.map);
  ASSERT_FALSE(fine.failed) << fine.failure;
  EXPECT_EQ(fine.degree, 2);
  EXPECT_NEAR(fine.rhs2, 3 / (8 * pi), 1e-15);
  EXPECT_NEAR(fine.area, 2 * pi, 2e-2);
  EXPECT_GT(coarse.slack2, 0);
  EXPECT_GT(fine.slack2, 0);
  EXPECT_NEAR(fine.slack2 / coarse.slack2, 1.0, 5e-2);
}

TEST(TrialBoundSum, HemisphereTransplantsAreEigenfunctions) {
  const auto s = hemisphere_fixture().make(24);
  EXPECT_NEAR(trial_bound_sum(s.mesh, s.map, {}), 1.5, 1e-2);
}

TEST(TrialBoundSum, DiscLiesBetweenProofChainEnds) {
  const auto s = disc_fixture().make(24);
  const double t = trial_bound_sum(s.mesh, s.map, {});
  const double upper = 1 / (bessel_j * bessel_j) + 2 / (bessel_p * bessel_p);
  EXPECT_NEAR(upper, 0.763, 1e-3);
  EXPECT_GT(t, 0.75 - 2e-3);
  EXPECT_LT(t, upper);
}

TEST(TrialBoundSum, BranchedDiscAboveFloor) {
  const auto r = verify_with_budget<double>(branched_disc_fixture().make, 8);
  ASSERT_TRUE(r.budget.has_value());
  EXPECT_GE(r.trial_sum, 2 * pi / (8 * pi / 3) - r.budget->sandwich);
}

TEST(TrialBoundSum, MatchesReportAndRejectsUnbalanced) {
  const auto s = random_conformal_fixtures(1, 31)[0].make(8);
  const auto r = verify_inequality(s.mesh, s.map);
  ASSERT_FALSE(r.failed) << r.failure;
  EXPECT_NEAR(trial_bound_sum(s.mesh, s.map, r.balance.a), r.trial_sum, 1e-12 * r.trial_sum);
  EXPECT_THROW(trial_bound_sum(s.mesh, s.map, r.balance.a + std::complex<double>(0.2, 0)), DomainError);
}

TEST(VerifyWithBudget, SandwichAndBudgetedSlacksOnFixtures) {
  for (const auto& fixture : standard_fixtures(3, 5)) {
    const auto r = verify_with_budget<double>(fixture.make, 6);
    ASSERT_FALSE(r.failed) << fixture.name << ": " << r.failure;
    ASSERT_TRUE(r.budget.has_value());
    EXPECT_TRUE(sandwich_holds(r)) << fixture.name;
    EXPECT_GE(r.slack2, -r.budget->slack2) << fixture.name;
    EXPECT_GE(r.slack3, -r.budget->slack3) << fixture.name;
    EXPECT_TRUE(eq3_implied_by_eq2(r)) << fixture.name;
    EXPECT_LE(r.mu1, r.mu2);
    EXPECT_LE(r.balance.residual, 1e-10 * r.area);
  }
}

TEST(RichardsonBudget, DifferencesOfTheTwoLevels) {
  auto coarse = synthetic(6, 3.5, 3.6, 3.1, 1);
  auto fine = synthetic(5.9, 3.45, 3.5, 3.13, 1);
  coarse.trial_sum = 0.74;
  fine.trial_sum = 0.745;
  coarse.vertices = 100;
  const auto b = richardson_budget(coarse, fine);
  EXPECT_EQ(b.coarse_vertices, 100);
  EXPECT_DOUBLE_EQ(b.slack2, std::abs(fine.slack2 - coarse.slack2));
  EXPECT_DOUBLE_EQ(b.slack3, std::abs(fine.slack3 - coarse.slack3));
  const double floor_diff = std::abs(fine.area - coarse.area) / (4 * pi / 3);
  const double recip_diff = std::abs((1 / 5.9 + 1 / 3.45 + 1 / 3.5) - (1 / 6.0 + 1 / 3.5 + 1 / 3.6));
  EXPECT_DOUBLE_EQ(b.sandwich, std::max({0.005, floor_diff, recip_diff}));
}

TEST(VerifyInequality, ScaleInvariance) {
  const auto s = random_conformal_fixtures(1, 77)[0].make(8);
  const auto base = verify_inequality(s.mesh, s.map);
  for (double c : {0.1, 3.0}) {
    const auto r = verify_inequality(s.mesh.scaled(c), s.map);
    ASSERT_FALSE(r.failed) << r.failure;
    EXPECT_NEAR(r.lhs2 / base.lhs2, 1.0, 1e-9);
    EXPECT_NEAR(r.slack2 / base.slack2, 1.0, 1e-9);
    EXPECT_NEAR(r.lambda1 * c * c / base.lambda1, 1.0, 1e-9);
  }
}

TEST(VerifyInequality, DegreeOverride) {
  const auto s = disc_fixture().make(6);
  VerifyOptions opt;
  opt.degree = 2;
  const auto r = verify_inequality(s.mesh, s.map, opt);
  EXPECT_EQ(r.degree, 2);
  EXPECT_NEAR(r.rhs2, 3 / (8 * pi), 1e-15);
}

TEST(VerifyInequality, FailureFlagKeepsPartialResults) {
  const auto s = disc_fixture().make(6);
  MapSampled shrunk = s.map;
  shrunk.values *= 0.9;
  const auto r = verify_inequality(s.mesh, shrunk);
  EXPECT_TRUE(r.failed);
  EXPECT_NE(r.failure.find("domain"), std::string::npos);
  EXPECT_GT(r.area, 0);
  EXPECT_EQ(r.vertices, s.mesh.vertex_count());
  EXPECT_TRUE(std::isnan(r.lambda1));
}
