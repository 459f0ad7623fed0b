#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ezdp/policyeval.hpp"
#include "ezdp/solver.hpp"
#include "support/random_models.hpp"

namespace ezdp {
namespace {

MarkovPlan stationary(const Policy& f, std::size_t n) { return MarkovPlan::repeat(f, n); }

TEST(FiniteHorizon, ConstantStreamClosedForm) {
  for (auto [rho, gamma] : {std::pair{0.5, 0.75}, {0.75, 0.5}, {1.25, 1.5}, {1.5, 1.25}}) {
    const double u = 2.0, beta = 0.9;
    const Mdp m = validate(testing::constant_model(u, beta, rho, gamma));
    const EvalReport rep = finite_horizon(m, stationary(Policy{{0}}, 30));
    for (std::size_t k = 1; k <= 30; ++k) {
      const double expected = u * std::pow(1.0 - std::pow(beta, static_cast<double>(k)), 1.0 / (1.0 - rho));
      EXPECT_NEAR(rep.horizon_values[k - 1][0], expected, 1e-12 * expected) << rho << " k=" << k;
    }
    EXPECT_NEAR(rep.limit_value[0], u, 1e-10 * u);
    EXPECT_EQ(rep.monotone_direction, rho < 1 ? Monotone::Increasing : Monotone::Decreasing);
  }
}

TEST(FiniteHorizon, HorizonOneFormula) {
  const Mdp m = validate(testing::fixture_model());
  MarkovPlan plan{{Policy{{0, 1}}}};
  const EvalReport rep = finite_horizon(m, plan);
  ASSERT_EQ(rep.horizon_values.size(), 1u);
  EXPECT_NEAR(rep.horizon_values[0][0], std::pow(0.1 * std::pow(1.0, 0.5), 2.0), 1e-15);
  EXPECT_NEAR(rep.horizon_values[0][1], std::pow(0.1 * std::pow(4.0, 0.5), 2.0), 1e-15);
}

TEST(FiniteHorizon, FixtureOptimalPlanConvergesUpward) {
  const Mdp m = validate(testing::fixture_model());
  const Policy f{{testing::kFixturePolicy[0], testing::kFixturePolicy[1]}};
  const EvalReport rep = finite_horizon(m, stationary(f, 400));
  for (std::size_t k = 1; k < rep.horizon_values.size(); ++k)
    for (StateIndex s = 0; s < 2; ++s) ASSERT_GE(rep.horizon_values[k][s], rep.horizon_values[k - 1][s]);
  for (StateIndex s = 0; s < 2; ++s) {
    EXPECT_NEAR(rep.horizon_values.back()[s], testing::kFixtureVStar[s], 1e-9);
    EXPECT_NEAR(rep.limit_value[s], testing::kFixtureVStar[s], 1e-10);
  }
}

TEST(FiniteHorizon, MixedRegimeRefused) {
  auto raw = testing::fixture_model();
  raw.gamma = 2.0;
  const Mdp m = validate(raw);
  EXPECT_THROW(finite_horizon(m, stationary(Policy{{0, 0}}, 3)), UnsupportedCase);
  EXPECT_THROW(utility_regime(m), UnsupportedCase);
}

TEST(FiniteHorizon, InfeasiblePlanRejected) {
  auto raw = testing::fixture_model();
  raw.feasible[1] = {0};
  raw.utility[1][1] = std::nullopt;
  raw.transition[1][1].clear();
  const Mdp m = validate(raw);
  EXPECT_THROW(finite_horizon(m, stationary(Policy{{0, 1}}, 2)), InfeasibleAction);
}

TEST(InfiniteHorizon, SingleStateIsUtility) {
  for (double rho : {0.4, 1.7}) {
    const Mdp m = validate(testing::constant_model(3.5, 0.8, rho, rho + 0.2));
    EXPECT_NEAR(infinite_horizon(m, Policy{{0}}, 1e-13)[0], 3.5, 1e-10);
  }
}

TEST(InfiniteHorizon, StationaryPolicyDefect) {
  std::mt19937_64 rng(21);
  for (CaseClass c : testing::kFourCases) {
    for (int i = 0; i < 10; ++i) {
      const Mdp m = testing::random_model(c, rng);
      const DerivedParams d = derive(m);
      const Policy f = random_plan(m, 1, rng).steps[0];
      const ValueFn vf = infinite_horizon(m, f, 1e-13);
      for (StateIndex s = 0; s < m.n_states(); ++s)
        EXPECT_NEAR(aggregator_H(m, d, s, f.actions[s], vf), vf[s], 1e-9 * vf[s]);
    }
  }
}

// ---------------------------------------------------------------------------
// Properties over random models

class PolicyEvalProperties : public ::testing::TestWithParam<CaseClass> {
 protected:
  std::mt19937_64 rng{static_cast<std::uint64_t>(4000 + static_cast<int>(GetParam()))};
};

TEST_P(PolicyEvalProperties, HorizonValuesAreMonotone) {
  for (int i = 0; i < 20; ++i) {
    const Mdp m = testing::random_model(GetParam(), rng);
    const MarkovPlan plan = random_plan(m, 25, rng);
    const EvalReport rep = finite_horizon(m, plan);
    const bool up = rep.monotone_direction == Monotone::Increasing;
    EXPECT_EQ(up, m.rho() < 1.0);
    for (std::size_t k = 1; k < rep.horizon_values.size(); ++k)
      for (StateIndex s = 0; s < m.n_states(); ++s) {
        const double prev = rep.horizon_values[k - 1][s], cur = rep.horizon_values[k][s];
        if (up) ASSERT_GE(cur, prev * (1 - 1e-14));
        else ASSERT_LE(cur, prev * (1 + 1e-14));
      }
  }
}

TEST_P(PolicyEvalProperties, AuditPassesAndOptimalPlanHasZeroMargin) {
  for (int i = 0; i < 5; ++i) {
    const Mdp m = testing::random_model(GetParam(), rng);
    const DerivedParams d = derive(m);
    const SolveReport sol = solve(m, 1e-12);
    const AuditReport rep = optimality_audit(m, sol.v_star, sol.policy, 30, 20, 99 + i);
    EXPECT_GE(rep.worst_margin, -1e-9);
    EXPECT_LE(rep.f_star_gap, 1e-9);
    const PlanMargin pm = audit_plan(m, d, sol.v_star, MarkovPlan::repeat(sol.policy, 20));
    EXPECT_NEAR(pm.margin, 0.0, 1e-9);
  }
}

TEST_P(PolicyEvalProperties, StationaryValuesDominated) {
  for (int i = 0; i < 10; ++i) {
    const Mdp m = testing::random_model(GetParam(), rng);
    const SolveReport sol = solve(m, 1e-12);
    for (int j = 0; j < 10; ++j) {
      const ValueFn vf = infinite_horizon(m, random_plan(m, 1, rng).steps[0], 1e-12);
      for (StateIndex s = 0; s < m.n_states(); ++s)
        EXPECT_LE((vf[s] - sol.v_star[s]) / m.omega()[s], 1e-9);
    }
  }
}

TEST_P(PolicyEvalProperties, BellmanOrbitReachesFixedPoint) {
  for (int i = 0; i < 10; ++i) {
    const Mdp m = testing::random_model(GetParam(), rng);
    const DerivedParams d = derive(m);
    const SolveReport sol = solve(m, 1e-12);
    const ValueFn a = bellman_orbit_from_zero(m, d, 5);
    const ValueFn b = bellman_orbit_from_zero(m, d, 6);
    for (StateIndex s = 0; s < m.n_states(); ++s) {
      if (m.rho() < 1) EXPECT_GE(b[s], a[s] * (1 - 1e-14));
      else EXPECT_LE(b[s], a[s] * (1 + 1e-14));
    }
    const ValueFn far = bellman_orbit_from_zero(m, d, 3000);
    EXPECT_LE(omega_distance(far.values, sol.v_star.values, m.omega()), 1e-8);
  }
}

INSTANTIATE_TEST_SUITE_P(FourCases, PolicyEvalProperties,
                         ::testing::Values(CaseClass::Case1, CaseClass::Case2, CaseClass::Case3, CaseClass::Case4),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(OptimalityAudit, FixtureHundredPlans) {
  const Mdp m = validate(testing::fixture_model());
  const SolveReport sol = solve(m, 1e-12);
  const AuditReport rep = optimality_audit(m, sol.v_star, sol.policy, 100, 40, 2024);
  EXPECT_EQ(rep.n_random, 100u);
  EXPECT_EQ(rep.seed, 2024u);
  EXPECT_GE(rep.worst_margin, -1e-9);
  // Same seed, same report.
  const AuditReport again = optimality_audit(m, sol.v_star, sol.policy, 100, 40, 2024);
  EXPECT_EQ(again.worst_margin, rep.worst_margin);
  EXPECT_EQ(again.worst_plan, rep.worst_plan);
}

TEST(OptimalityAudit, ConstantModelMarginsAreZero) {
  const Mdp m = validate(testing::constant_model(2.0, 0.9, 0.5, 0.75));
  const SolveReport sol = solve(m, 1e-13);
  const AuditReport rep = optimality_audit(m, sol.v_star, sol.policy, 10, 5, 1);
  EXPECT_NEAR(rep.worst_margin, 0.0, 1e-10);
}

TEST(OptimalityAudit, UnderstatedValueIsCaught) {
  const Mdp m = validate(testing::fixture_model());
  const DerivedParams d = derive(m);
  const SolveReport sol = solve(m, 1e-12);
  ValueFn low = sol.v_star;
  low.values[1] -= 0.01;
  const PlanMargin pm = audit_plan(m, d, low, MarkovPlan::repeat(sol.policy, 10));
  EXPECT_EQ(pm.state, 1u);
  EXPECT_NEAR(pm.margin, -0.01, 1e-9);

  for (auto& v : low.values) v *= 0.5;
  try {
    optimality_audit(m, low, sol.policy, 20, 10, 3);
    FAIL();
  } catch (const AuditFailed& e) {
    EXPECT_EQ(e.plan(), 0u);
    EXPECT_LT(e.margin(), -1.0);
  }
}

}  // namespace
}  // namespace ezdp
