#include <cmath>

#include <gtest/gtest.h>

#include "kktcert/errors.hpp"
#include "kktcert/kkt.hpp"
#include "kktcert/witness.hpp"
#include "test_support.hpp"

namespace kktcert::witness {
namespace {

using testing::load_fixture;
using testing::vec;

kkt::ActiveSet active_at(const ProblemSpec& p, const Vector& x) {
  return kkt::active_set(p, x, 1e-8);
}

const std::vector<double> kEps = {0.0, 1e-5, 1e-4, 1e-3, 1e-2};

TEST(DescentWitness, UnconstrainedBowl) {
  const auto p = load_fixture("bowl.kkt");
  const Vector x = vec({1, 0});
  const auto w = descent_witness(p, x, active_at(p, x), 0.19);
  // x_nu = (1 - t/2, 0) with (1 - t/2)^2 = 0.81.
  EXPECT_NEAR(w.x_nu[0], 0.9, 1e-12);
  EXPECT_NEAR(w.x_nu[1], 0.0, 1e-15);
  EXPECT_NEAR(w.objective_drop, 0.19, 1e-12);
  EXPECT_EQ(w.nu_halvings, 0);
  EXPECT_LE(w.jacobian_identity_deviation, kIdentityTolerance);
}

TEST(DescentWitness, CircleFrozenPoints) {
  const auto p = load_fixture("circle-min-x1.kkt");
  const Vector x = vec({1, 1});
  struct Case {
    double nu, x0, x1;
  };
  // Closed form from derive_fixtures.py: x1 = 1 - nu, x0 = sqrt(2 - x1^2).
  const Case cases[] = {{1e-2, 1.0099009852455834, 0.99},
                        {1e-3, 1.0009990009985025, 0.999},
                        {1e-4, 1.0000999900009999, 0.9999}};
  for (const auto& c : cases) {
    const auto w = descent_witness(p, x, active_at(p, x), c.nu);
    EXPECT_NEAR(w.x_nu[0], c.x0, 1e-12) << c.nu;
    EXPECT_NEAR(w.x_nu[1], c.x1, 1e-12) << c.nu;
    EXPECT_LE(std::abs(w.objective_drop - c.nu), 1e-10);
    EXPECT_LE(w.max_constraint_violation, 1e-10);
    EXPECT_LE(w.newton_iters, 10);
  }
}

TEST(DescentWitness, DependentFamilyAtKktPoint) {
  const auto p = load_fixture("ball-max.kkt");
  const Vector x = vec({1, 0});
  EXPECT_THROW(descent_witness(p, x, active_at(p, x), 1e-3), DependentFamily);
  const auto c = load_fixture("circle.kkt");
  EXPECT_THROW(descent_witness(c, vec({-1, -1}), active_at(c, vec({-1, -1})), 1e-3),
               DependentFamily);
}

TEST(DescentWitness, Preconditions) {
  const auto p = load_fixture("circle.kkt");
  EXPECT_THROW(descent_witness(p, vec({0, 0}), active_at(p, vec({0, 0})), 1e-3),
               PreconditionFailed);
  EXPECT_THROW(descent_witness(p, vec({1, 1}), active_at(p, vec({1, 1})), 0.0), InputError);
}

TEST(DescentWitness, HalvesNuWhenTargetTooFar) {
  // Objective drop of 5 is unreachable inside the unit Newton ball.
  const auto p = load_fixture("circle-min-x1.kkt");
  const Vector x = vec({1, 1});
  const auto w = descent_witness(p, x, active_at(p, x), 5.0);
  EXPECT_GT(w.nu_halvings, 0);
  EXPECT_NEAR(w.objective_drop, w.nu, 1e-10);
  EXPECT_LE(w.max_constraint_violation, 1e-10);
}

TEST(DescentWitness, KeepsInactiveInequalitiesStrict) {
  const auto p = parse_problem_file("vars 2\nminimize x1\nineq x0 - 1\nineq -x1 - 0.3\n");
  const Vector x = vec({1, 0});
  const auto w = descent_witness(p, x, active_at(p, x), 0.5);
  EXPECT_LT(w.x_nu[1], 0.0);
  EXPECT_GT(w.x_nu[1], -0.3);
  EXPECT_GT(w.nu_halvings, 0);
}

TEST(ConstraintCurve, BallMax) {
  const auto p = load_fixture("ball-max.kkt");
  const Vector x = vec({1, 0});
  const auto c = constraint_curve(p, x, active_at(p, x), 0, {0.0, 0.19});
  EXPECT_EQ(c.points[0], x);
  EXPECT_EQ(c.newton_iters[0], 0);
  EXPECT_NEAR(c.points[1][0], 0.9, 1e-10);
  EXPECT_NEAR(c.points[1][1], 0.0, 1e-10);
  EXPECT_NEAR(c.w_j0[0], 0.5, 1e-15);
  EXPECT_LE(c.jacobian_identity_deviation, kIdentityTolerance);
}

TEST(ConstraintCurve, ArcKeepsEqualityPinned) {
  const auto p = load_fixture("arc.kkt");
  const Vector x = *p.point();
  const auto c = constraint_curve(p, x, active_at(p, x), 0, {0.0, 1e-3});
  // Frozen: (sqrt(2 - 1e-6), 1e-3).
  EXPECT_NEAR(c.points[1][0], 1.4142132088196603, 1e-10);
  EXPECT_NEAR(c.points[1][1], 1e-3, 1e-10);
  EXPECT_LE(std::abs(expr::eval_value(p.constraint(0), c.points[1])), kCurveTolerance);
}

TEST(ConstraintCurve, Preconditions) {
  const auto p = load_fixture("halfspace.kkt");
  const Vector x = vec({1, 0});
  EXPECT_THROW(constraint_curve(p, x, active_at(p, x), 1, kEps), PreconditionFailed);
  const Vector inner = vec({2, 0});
  EXPECT_THROW(constraint_curve(p, inner, active_at(p, inner), 0, kEps), PreconditionFailed);
  const auto dup = parse_problem_file("vars 1\nminimize x0\nineq -x0\nineq -2*x0\n");
  EXPECT_THROW(constraint_curve(dup, vec({0}), active_at(dup, vec({0})), 0, kEps), LicqFailure);
}

TEST(ConstraintCurve, TangentErrorDecaysLinearly) {
  const auto p = load_fixture("ball-max.kkt");
  const Vector x = vec({1, 0});
  const auto c = constraint_curve(p, x, active_at(p, x), 0, {1e-2, 1e-3, 1e-4});
  std::vector<double> err;
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    const double eps = c.epsilons[i];
    err.push_back((c.points[i] - (x - eps * c.w_j0)).norm() / eps);  // target is -eps
  }
  // Frozen from the closed form sqrt(1 - eps).
  EXPECT_NEAR(err[0], 1.2563e-3, 1e-7);
  EXPECT_NEAR(err[1], 1.2506e-4, 1e-8);
  EXPECT_NEAR(err[2], 1.25006e-5, 1e-9);
  EXPECT_GE(err[0] / err[1], 5.0);
  EXPECT_LE(err[0] / err[1], 20.0);
  EXPECT_GE(err[1] / err[2], 5.0);
  EXPECT_LE(err[1] / err[2], 20.0);
}

TEST(DirectionalSlope, MatchesMultiplier) {
  struct Case {
    const char* fixture;
    std::size_t j0;
    double fd;
  };
  const Case cases[] = {{"ball-max.kkt", 0, -0.50000125000625}, {"halfspace.kkt", 0, 2.00001}};
  for (const auto& c : cases) {
    const auto p = load_fixture(c.fixture);
    const Vector x = *p.point();
    const auto report = kkt::kkt_report(p, x);
    const double mu = report.multipliers->mu[static_cast<Eigen::Index>(c.j0)];
    const auto curve = constraint_curve(p, x, report.active_set, c.j0, kEps);
    const auto s = directional_slope(p, curve);
    EXPECT_EQ(s.eps, 1e-5);
    EXPECT_NEAR(s.forward_difference, c.fd, 1e-9) << c.fixture;
    EXPECT_NEAR(s.forward_difference, mu, 1e-4) << c.fixture;
    EXPECT_NEAR(s.analytic, mu, 1e-8) << c.fixture;
    ASSERT_TRUE(curve.slope_estimate.has_value());
    EXPECT_EQ(*curve.slope_estimate, s.forward_difference);
  }
}

TEST(DirectionalSlope, ConstantObjectiveHasZeroSlope) {
  const auto p = parse_problem_file("vars 2\nminimize 3\nineq x0^2 + x1^2 - 1\n");
  const Vector x = vec({1, 0});
  const auto curve = constraint_curve(p, x, active_at(p, x), 0, kEps);
  const auto s = directional_slope(p, curve);
  EXPECT_EQ(s.forward_difference, 0.0);
  EXPECT_EQ(s.analytic, 0.0);
}

TEST(DirectionalSlope, NeedsZeroAndPositiveEps) {
  const auto p = load_fixture("ball-max.kkt");
  const Vector x = vec({1, 0});
  const auto only_zero = constraint_curve(p, x, active_at(p, x), 0, {0.0});
  EXPECT_THROW(directional_slope(p, only_zero), PreconditionFailed);
  const auto no_zero = constraint_curve(p, x, active_at(p, x), 0, {1e-3});
  EXPECT_THROW(directional_slope(p, no_zero), PreconditionFailed);
}

TEST(DirectionalSlope, NonnegativeAtKktPoints) {
  for (const char* name : {"halfspace.kkt", "orthant.kkt", "arc.kkt"}) {
    const auto p = load_fixture(name);
    const Vector x = *p.point();
    const auto report = kkt::kkt_report(p, x);
    ASSERT_EQ(report.verdict, kkt::Verdict::kKktSatisfied) << name;
    for (std::size_t j = 0; j < p.num_inequalities(); ++j) {
      if (!report.active_set.contains(p.num_equalities() + j)) continue;
      const auto curve = constraint_curve(p, x, report.active_set, j, kEps);
      EXPECT_GE(directional_slope(p, curve).forward_difference, -1e-6) << name << " j=" << j;
    }
  }
}

TEST(SignWitness, BallMax) {
  const auto p = load_fixture("ball-max.kkt");
  const Vector x = vec({1, 0});
  const auto w = sign_witness(p, x, active_at(p, x), 0);
  EXPECT_NEAR(w.mu_j0, -0.5, 1e-12);
  EXPECT_EQ(w.eps, 1e-2);
  EXPECT_NEAR(w.point[0], 0.99498743710661995, 1e-12);
  EXPECT_NEAR(w.point[1], 0.0, 1e-12);
  EXPECT_LT(w.point[0], 1.0);
  EXPECT_LE(w.max_constraint_violation, 1e-8);
  EXPECT_GE(w.objective_drop, 0.25 * 0.5 * w.eps);
}

TEST(SignWitness, RefusesNonnegativeMultiplier) {
  const auto p = parse_problem_file("vars 2\nminimize -x0\nineq x0 - 1\n");
  const Vector x = vec({1, 0});
  EXPECT_THROW(sign_witness(p, x, active_at(p, x), 0), PreconditionFailed);
  const auto o = load_fixture("orthant.kkt");
  const Vector z = vec({0, 0});
  EXPECT_THROW(sign_witness(o, z, active_at(o, z), 0), PreconditionFailed);
  EXPECT_THROW(sign_witness(o, z, active_at(o, z), 1), PreconditionFailed);
}

TEST(SignWitness, HalvesEpsWhenStartTooLarge) {
  const auto p = load_fixture("ball-max.kkt");
  const Vector x = vec({1, 0});
  const auto w = sign_witness(p, x, active_at(p, x), 0, {}, {}, 4.0);
  EXPECT_LT(w.eps, 4.0);
  EXPECT_LE(w.max_constraint_violation, 1e-8);
  EXPECT_LT(w.point[0], 1.0);
}

TEST(Soundness, WitnessPointsRecheckIndependently) {
  // Re-evaluate witness points straight from the expressions.
  const auto p = load_fixture("circle-min-x1.kkt");
  const Vector x = vec({1, 1});
  for (double nu : {1e-2, 1e-3, 1e-4}) {
    const auto w = descent_witness(p, x, active_at(p, x), nu);
    EXPECT_LT(expr::eval_value(p.objective(), w.x_nu), expr::eval_value(p.objective(), x));
    EXPECT_LE(std::abs(expr::eval_value(p.constraint(0), w.x_nu)), 1e-10);
  }
  const auto b = load_fixture("ball-max.kkt");
  const auto s = sign_witness(b, vec({1, 0}), active_at(b, vec({1, 0})), 0);
  EXPECT_LT(expr::eval_value(b.objective(), s.point), 1.0);
  EXPECT_LE(expr::eval_value(b.constraint(0), s.point), 1e-8);
}

TEST(MaxConstraintViolation, MixesEqualitiesAndInequalities) {
  const auto p = parse_problem_file("vars 1\nminimize x0\neq x0 - 1\nineq x0 - 3\nineq -x0\n");
  EXPECT_EQ(max_constraint_violation(p, vec({1})), 0.0);
  EXPECT_EQ(max_constraint_violation(p, vec({4})), 3.0);
  EXPECT_EQ(max_constraint_violation(p, vec({-0.5})), 1.5);
}

}  // namespace
}  // namespace kktcert::witness
