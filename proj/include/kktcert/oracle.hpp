#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "kktcert/expr.hpp"
#include "kktcert/kkt.hpp"
#include "kktcert/problem.hpp"
#include "kktcert/witness.hpp"

namespace kktcert::oracle {

using linalg::Vector;

/// Central differences (e(x + h e_k) - e(x - h e_k)) / 2h per coordinate.
Vector finite_diff_gradient(const expr::Expr& e, const Vector& x, double h = 1e-6);

inline constexpr double kProjectionTolerance = 1e-10;

struct Projection {
  Vector point;
  int iterations = 0;
};

/// Gauss-Newton projection x <- x - G^T (G G^T)^{-1} F(x) onto the surface
/// where every constraint in `active` vanishes, until max |f_i| <= 1e-10.
/// Throws NoConvergence after cfg.max_iters iterations.
Projection project_feasible(const ProblemSpec& p, const Vector& x0, const kkt::ActiveSet& active,
                            const witness::NewtonConfig& cfg = {});

/// SplitMix64 (Steele, Lea, Flood 2014): state += 0x9E3779B97F4A7C15, then
/// xor-shift-multiply by 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal by Box-Muller; one uniform pair per call, sine branch discarded.
  double normal();

  /// Seed of the independent stream for sample `index` under `seed`.
  static std::uint64_t stream(std::uint64_t seed, std::uint64_t index);

 private:
  std::uint64_t state_;
};

inline constexpr std::string_view kGeneratorName = "splitmix64";

struct ProbeOptions {
  double tol_feas = 1e-8;
  double tol_active = 1e-8;
  /// Unset means 1e-10 * (1 + |f_0(x)|).
  std::optional<double> tol_probe;
  /// 0 picks the hardware concurrency. Results do not depend on this.
  unsigned threads = 0;
  witness::NewtonConfig projection;
};

struct Counterexample {
  Vector point;
  double value;
  std::size_t sample_index;
};

struct ProbeResult {
  std::size_t samples_tested = 0;
  std::size_t samples_accepted = 0;
  /// Best accepted sample, when it beats f_0(x) by more than tol_probe.
  std::optional<Counterexample> counterexample;
  /// Lowest f_0 among accepted samples.
  std::optional<double> best_feasible_value;
  double reference_value = 0.0;
  double tol_probe = 0.0;
  double radius = 0.0;
  std::uint64_t seed = 0;
  std::string_view generator = kGeneratorName;
};

/// Draws `samples` points uniformly in the ball of `radius` around x, sample i
/// from its own SplitMix64 stream. Each is projected onto the equality
/// surface, and again with any violated active inequality held at 0; samples
/// that still violate an inequality (f_i > 0), an equality (|f_i| >
/// tol_feas) or the domain box are discarded. The best accepted sample (ties
/// to the lowest index) is a counterexample if f_0 < f_0(x) - tol_probe.
///
/// Samples are evaluated in parallel; the result is identical to sequential
/// evaluation. Throws PreconditionFailed if x is infeasible.
ProbeResult local_min_probe(const ProblemSpec& p, const Vector& x, double radius,
                            std::size_t samples, std::uint64_t seed,
                            const ProbeOptions& options = {});

}  // namespace kktcert::oracle
