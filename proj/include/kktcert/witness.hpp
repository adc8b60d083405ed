#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "kktcert/kkt.hpp"
#include "kktcert/linalg.hpp"
#include "kktcert/problem.hpp"

namespace kktcert::witness {

using linalg::Matrix;
using linalg::Vector;

struct NewtonConfig {
  int max_iters = 50;
  double tol_residual = 1e-12;
  /// Iterates must stay in the ball |t| <= max_step_radius around the origin.
  double max_step_radius = 1.0;
  double backtrack_factor = 0.5;
  int max_halvings = 30;

  /// Throws InputError unless every field is positive and the factor is in (0, 1).
  void validate() const;
};

struct MapEvaluation {
  Vector value;
  Matrix jacobian;
};

using SmoothMap = std::function<MapEvaluation(const Vector&)>;

struct NewtonResult {
  Vector t;
  int iterations = 0;
  /// |F(t) - target|_inf at the returned t.
  double residual = 0.0;
};

/// Damped Newton solve of F(t) = target starting from t = 0.
///
/// A step is halved (up to cfg.max_halvings times) until the residual norm
/// decreases; trial points where F throws are treated as failed trials.
/// Throws NoConvergence if an iterate would leave the max_step_radius ball or
/// the iteration budget runs out, and JacobianSingular if a Jacobian cannot be
/// inverted.
NewtonResult newton_inverse(const SmoothMap& f, const Vector& target, const NewtonConfig& cfg);

/// t -> (g_0(base + V t), ..., g_{k-1}(base + V t)) for a family of
/// expressions g and a d x k matrix V. Its Jacobian is G(base + V t) V, with G
/// the stacked gradients, so it is the identity at t = 0 when V is a dual
/// basis of G(base).
class ChartMap {
 public:
  ChartMap(const ProblemSpec& problem, std::vector<expr::Expr> family, Vector base, Matrix basis);

  Vector point(const Vector& t) const { return base_ + basis_ * t; }

  /// Throws OutsideDomain if the chart point leaves the domain box.
  MapEvaluation operator()(const Vector& t) const;

  /// max entrywise |J(0) - I|.
  double identity_deviation() const;

 private:
  const ProblemSpec* problem_;
  std::vector<expr::Expr> family_;
  Vector base_;
  Matrix basis_;
};

/// Largest deviation tolerated between the chart Jacobian at 0 and the identity.
inline constexpr double kIdentityTolerance = 1e-8;
/// Newton target radius is halved at most this many times.
inline constexpr int kMaxTargetHalvings = 40;

struct DescentWitness {
  /// Objective decrease actually targeted (the request, possibly halved).
  double nu = 0.0;
  int nu_halvings = 0;
  Vector x_nu;
  /// Chart coefficients: x_nu = x + sum_i t_i v_i, t_0 pairing with f_0.
  Vector t_nu;
  double objective_drop = 0.0;
  /// Over every constraint: |f_i| for equalities, max(f_i, 0) for inequalities.
  double max_constraint_violation = 0.0;
  int newton_iters = 0;
  double jacobian_identity_deviation = 0.0;
};

/// Builds the dual basis of {f_0'(x)} u {f_i'(x) : i active}, then solves
/// f_0(sigma(t)) = f_0(x) - nu and f_i(sigma(t)) = 0 for the active i with
/// sigma(t) = x + sum t_i v_i. On NoConvergence, or if an inactive inequality
/// stops being strictly satisfied, nu is halved (at most 40 times).
///
/// Throws PreconditionFailed if x is infeasible, DependentFamily when
/// f_0'(x) lies in the span of the active gradients, NoConvergence when every
/// halving fails.
DescentWitness descent_witness(const ProblemSpec& p, const Vector& x, const kkt::ActiveSet& active,
                               double nu, const NewtonConfig& cfg = {},
                               const kkt::Tolerances& tol = {});

struct Curve {
  /// Relaxed inequality, 0-based among inequalities.
  std::size_t j0 = 0;
  Vector base;
  std::vector<double> epsilons;
  std::vector<Vector> points;
  std::vector<int> newton_iters;
  /// Dual vector paired with f_{n+j0}'(x).
  Vector w_j0;
  /// (f_0(x(eps)) - f_0(x)) / eps at the smallest positive eps, if any.
  std::optional<double> slope_estimate;
  double jacobian_identity_deviation = 0.0;
};

/// Tolerance on the curve's constraint values: f_{j0} = -eps and the other
/// active constraints 0.
inline constexpr double kCurveTolerance = 1e-10;

/// Samples x(eps) = s(phi^{-1}(-eps e_{j0})) with s(t) = x + sum t_i w_i and
/// {w_i} the dual basis of the active gradients: for each eps the point keeps
/// every other active constraint at 0 and sets inequality j0 to -eps.
///
/// Throws LicqFailure, PreconditionFailed if j0 is not active, and
/// NoConvergence for an eps outside the reachable neighbourhood.
Curve constraint_curve(const ProblemSpec& p, const Vector& x, const kkt::ActiveSet& active,
                       std::size_t j0, const std::vector<double>& epsilons,
                       const NewtonConfig& cfg = {}, double tol_rank = linalg::kDefaultRankTolerance);

struct SlopeEstimate {
  double eps = 0.0;
  /// (f_0(x(eps)) - f_0(x)) / eps at the smallest positive sampled eps.
  double forward_difference = 0.0;
  /// -f_0'(x) . w_j0, which equals mu_j0 at a stationary point.
  double analytic = 0.0;
};

/// Throws PreconditionFailed unless the curve was sampled at eps = 0 and at
/// some eps > 0.
SlopeEstimate directional_slope(const ProblemSpec& p, const Curve& curve);

struct SignWitness {
  std::size_t j0 = 0;
  double mu_j0 = 0.0;
  double eps = 0.0;
  Vector point;
  double objective_drop = 0.0;
  double max_constraint_violation = 0.0;
  int newton_iters = 0;
};

/// Smallest eps tried before giving up.
inline constexpr double kMinSignEps = 1e-12;

/// For mu_j0 < -tol.sign, walks the curve relaxing inequality j0 and returns a
/// feasible x' = x(eps) with f_0(x') <= f_0(x) - 0.25 |mu_j0| eps, halving eps
/// from `initial_eps` as needed.
///
/// Throws PreconditionFailed if mu_j0 >= -tol.sign, LicqFailure, and
/// NoDescentFound once eps drops below 1e-12.
SignWitness sign_witness(const ProblemSpec& p, const Vector& x, const kkt::ActiveSet& active,
                         std::size_t j0, const NewtonConfig& cfg = {},
                         const kkt::Tolerances& tol = {}, double initial_eps = 1e-2);

/// max over all constraints of |f_i| (equalities) or max(f_i, 0) (inequalities).
double max_constraint_violation(const ProblemSpec& p, const Vector& x);

}  // namespace kktcert::witness
