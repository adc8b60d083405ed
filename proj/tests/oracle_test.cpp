#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "kktcert/errors.hpp"
#include "kktcert/oracle.hpp"
#include "test_support.hpp"

namespace kktcert::oracle {
namespace {

using testing::load_fixture;
using testing::vec;

TEST(FiniteDifferences, Polynomial) {
  const auto e = expr::parse_expression("x0^2 + 3*x1", 2);
  const Vector g = finite_diff_gradient(e, vec({1, 5}));
  EXPECT_NEAR(g[0], 2.0, 1e-8);
  EXPECT_NEAR(g[1], 3.0, 1e-8);
}

TEST(FiniteDifferences, Transcendental) {
  const auto e = expr::parse_expression("sin(x0*x1)", 2);
  const Vector g = finite_diff_gradient(e, vec({0.5, 2}));
  EXPECT_NEAR(g[0], 1.0806046117362794, 1e-8);
  EXPECT_NEAR(g[1], 0.27015115293406986, 1e-8);
}

TEST(Projection, BackOntoCircle) {
  const auto p = load_fixture("circle.kkt");
  kkt::ActiveSet all{{0}, 1e-8};
  const auto r = project_feasible(p, vec({1.1, 1.1}), all);
  // Gauss-Newton stays on the diagonal, so the limit is (1, 1).
  EXPECT_NEAR(r.point[0], 1.0, 1e-10);
  EXPECT_NEAR(r.point[1], 1.0, 1e-10);
  EXPECT_GT(r.iterations, 0);
  EXPECT_LE(std::abs(expr::eval_value(p.constraint(0), r.point)), kProjectionTolerance);
}

TEST(Projection, FeasibleStartAndEmptySet) {
  const auto p = load_fixture("circle.kkt");
  const auto on = project_feasible(p, vec({1, 1}), {{0}, 1e-8});
  EXPECT_EQ(on.iterations, 0);
  EXPECT_EQ(on.point, vec({1, 1}));
  const auto none = project_feasible(p, vec({3, 4}), {});
  EXPECT_EQ(none.point, vec({3, 4}));
}

TEST(SplitMix64, KnownSequence) {
  // Reference outputs of SplitMix64 seeded with 0.
  SplitMix64 g(0);
  EXPECT_EQ(g.next(), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(g.next(), 0x6E789E6AA1B965F4ull);
  EXPECT_EQ(g.next(), 0x06C45D188009454Full);
}

TEST(SplitMix64, UniformRangeAndStreams) {
  SplitMix64 g(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = g.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(SplitMix64::stream(7, i));
  EXPECT_EQ(seeds.size(), 1000u);
}

TEST(Probe, KktPointOnCircleHasNoCounterexample) {
  const auto p = load_fixture("circle.kkt");
  const auto r = local_min_probe(p, vec({-1, -1}), 0.1, 10000, 0);
  EXPECT_EQ(r.samples_tested, 10000u);
  EXPECT_GT(r.samples_accepted, 0u);
  EXPECT_FALSE(r.counterexample.has_value());
  EXPECT_EQ(r.reference_value, -2.0);
  EXPECT_EQ(r.generator, "splitmix64");
}

TEST(Probe, BallMaxCounterexampleRechecks) {
  const auto p = load_fixture("ball-max.kkt");
  const auto r = local_min_probe(p, vec({1, 0}), 0.05, 2000, 3);
  ASSERT_TRUE(r.counterexample.has_value());
  const auto& c = *r.counterexample;
  EXPECT_LT(c.value, 1.0);
  EXPECT_EQ(expr::eval_value(p.objective(), c.point), c.value);
  EXPECT_LE(expr::eval_value(p.constraint(0), c.point), 0.0);
  EXPECT_LE((c.point - vec({1, 0})).norm(), 0.05 + 1e-6);
}

TEST(Probe, ZeroSamples) {
  const auto p = load_fixture("halfspace.kkt");
  const auto r = local_min_probe(p, vec({1, 0}), 0.05, 0, 0);
  EXPECT_EQ(r.samples_tested, 0u);
  EXPECT_EQ(r.samples_accepted, 0u);
  EXPECT_FALSE(r.counterexample.has_value());
  EXPECT_FALSE(r.best_feasible_value.has_value());
}

TEST(Probe, Preconditions) {
  const auto p = load_fixture("circle.kkt");
  EXPECT_THROW(local_min_probe(p, vec({0, 0}), 0.05, 10, 0), PreconditionFailed);
  EXPECT_THROW(local_min_probe(p, vec({-1, -1}), 0.0, 10, 0), InputError);
}

bool same(const ProbeResult& a, const ProbeResult& b) {
  if (a.samples_tested != b.samples_tested || a.samples_accepted != b.samples_accepted) return false;
  if (a.best_feasible_value != b.best_feasible_value) return false;
  if (a.counterexample.has_value() != b.counterexample.has_value()) return false;
  if (!a.counterexample) return true;
  return a.counterexample->point == b.counterexample->point &&
         a.counterexample->value == b.counterexample->value &&
         a.counterexample->sample_index == b.counterexample->sample_index;
}

TEST(Probe, DeterministicForSeedAndThreadCount) {
  const auto p = load_fixture("ball-max.kkt");
  ProbeOptions one;
  one.threads = 1;
  ProbeOptions four;
  four.threads = 4;
  const auto a = local_min_probe(p, vec({1, 0}), 0.05, 3000, 11, one);
  const auto b = local_min_probe(p, vec({1, 0}), 0.05, 3000, 11, four);
  const auto c = local_min_probe(p, vec({1, 0}), 0.05, 3000, 11, four);
  EXPECT_TRUE(same(a, b));
  EXPECT_TRUE(same(b, c));
  const auto other = local_min_probe(p, vec({1, 0}), 0.05, 3000, 12, one);
  EXPECT_FALSE(same(a, other));
}

TEST(Probe, NoCounterexampleAtKktFixtures) {
  for (const char* name : {"circle.kkt", "halfspace.kkt", "orthant.kkt", "arc.kkt"}) {
    const auto p = load_fixture(name);
    const auto r = local_min_probe(p, *p.point(), 0.05, 3000, 1);
    EXPECT_FALSE(r.counterexample.has_value()) << name;
    EXPECT_GT(r.samples_accepted, 0u) << name;
  }
}

}  // namespace
}  // namespace kktcert::oracle
