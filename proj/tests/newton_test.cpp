#include <cmath>

#include <gtest/gtest.h>

#include "kktcert/errors.hpp"
#include "kktcert/witness.hpp"
#include "test_support.hpp"

namespace kktcert::witness {
namespace {

using testing::vec;

MapEvaluation identity_map(const Vector& t) {
  return {t, Matrix::Identity(t.size(), t.size())};
}

TEST(NewtonInverse, IdentityOneIteration) {
  const auto r = newton_inverse(identity_map, vec({0.3, -0.2}), {});
  EXPECT_EQ(r.iterations, 1);
  EXPECT_NEAR(r.t[0], 0.3, 1e-15);
  EXPECT_NEAR(r.t[1], -0.2, 1e-15);
}

TEST(NewtonInverse, AlreadyAtTarget) {
  const auto r = newton_inverse(identity_map, vec({0, 0}), {});
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.t, vec({0, 0}));
}

TEST(NewtonInverse, ClosedFormQuadratic) {
  // (1 + t/2)^2 - 1 = -0.19  =>  t = 2 (sqrt(0.81) - 1) = -0.2
  const SmoothMap f = [](const Vector& t) {
    const double u = 1.0 + 0.5 * t[0];
    MapEvaluation e{Vector(1), Matrix(1, 1)};
    e.value[0] = u * u - 1.0;
    e.jacobian(0, 0) = u;
    return e;
  };
  const auto r = newton_inverse(f, vec({-0.19}), {});
  EXPECT_NEAR(r.t[0], -0.2, 1e-14);
  EXPECT_LE(r.residual, 1e-12);
}

TEST(NewtonInverse, TargetOutsideRadius) {
  EXPECT_THROW(newton_inverse(identity_map, vec({6, 8}), {}), NoConvergence);
}

TEST(NewtonInverse, Unreachable) {
  // t^2 + 1 never reaches 0.
  const SmoothMap f = [](const Vector& t) {
    MapEvaluation e{Vector(1), Matrix(1, 1)};
    e.value[0] = t[0] * t[0] + 1.0;
    e.jacobian(0, 0) = 2.0 * t[0] + 1.0;  // deliberately inconsistent derivative
    return e;
  };
  EXPECT_THROW(newton_inverse(f, vec({0}), {}), NumericalError);
}

TEST(NewtonInverse, SingularJacobian) {
  const SmoothMap f = [](const Vector& t) {
    return MapEvaluation{t, Matrix::Zero(t.size(), t.size())};
  };
  EXPECT_THROW(newton_inverse(f, vec({0.1}), {}), JacobianSingular);
}

TEST(NewtonInverse, DampingRecoversFromOvershoot) {
  // atan has a far-reaching Newton step from t = 0.8 but damping keeps it stable.
  const SmoothMap f = [](const Vector& t) {
    MapEvaluation e{Vector(1), Matrix(1, 1)};
    e.value[0] = std::atan(t[0]);
    e.jacobian(0, 0) = 1.0 / (1.0 + t[0] * t[0]);
    return e;
  };
  NewtonConfig cfg;
  cfg.max_step_radius = 10.0;
  const auto r = newton_inverse(f, vec({std::atan(1.5)}), cfg);
  EXPECT_NEAR(r.t[0], 1.5, 1e-12);
}

TEST(NewtonConfig, Validation) {
  NewtonConfig cfg;
  cfg.backtrack_factor = 1.0;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = {};
  cfg.max_iters = 0;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = {};
  cfg.max_step_radius = -1.0;
  EXPECT_THROW(cfg.validate(), InputError);
}

TEST(ChartMap, JacobianAtOriginIsIdentityForDualBasis) {
  const auto p = testing::load_fixture("circle-min-x1.kkt");
  const Vector x = vec({1, 1});
  Matrix rows(2, 2);
  rows.row(0) = expr::eval_gradient(p.objective(), x).gradient;
  rows.row(1) = expr::eval_gradient(p.constraint(0), x).gradient;
  const auto basis = linalg::dual_basis(rows);
  const ChartMap phi(p, {p.objective(), p.constraint(0)}, x, basis.vectors());
  EXPECT_LE(phi.identity_deviation(), 1e-14);
  const auto at0 = phi(Vector::Zero(2));
  EXPECT_NEAR(at0.value[0], 1.0, 1e-15);
  EXPECT_NEAR(at0.value[1], 0.0, 1e-15);
}

TEST(ChartMap, LeavingTheBoxThrows) {
  const auto p = parse_problem_file("vars 1\nminimize x0\nbox 0 0 2");
  const ChartMap phi(p, {p.objective()}, vec({1}), Matrix::Identity(1, 1));
  EXPECT_NO_THROW(phi(vec({0.5})));
  EXPECT_THROW(phi(vec({1.0})), OutsideDomain);
}

}  // namespace
}  // namespace kktcert::witness
