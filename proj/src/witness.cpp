#include "kktcert/witness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kktcert/errors.hpp"

namespace kktcert::witness {

namespace {

std::vector<expr::Expr> active_family(const ProblemSpec& p, const kkt::ActiveSet& active) {
  std::vector<expr::Expr> family;
  family.reserve(active.size());
  for (std::size_t i : active.indices) family.push_back(p.constraint(i));
  return family;
}

void require_identity(const ChartMap& chart, double& deviation) {
  deviation = chart.identity_deviation();
  if (!(deviation <= kIdentityTolerance)) {
    throw BasisCheckFailed("chart Jacobian at 0 deviates from the identity by " +
                           std::to_string(deviation));
  }
}

// Every inequality that was inactive at the base point must stay strictly negative.
bool inactive_strictly_satisfied(const ProblemSpec& p, const kkt::ActiveSet& active,
                                 const Vector& y) {
  for (std::size_t j = 0; j < p.num_inequalities(); ++j) {
    const std::size_t i = p.num_equalities() + j;
    if (active.contains(i)) continue;
    if (!(expr::eval_value(p.constraint(i), y) < 0.0)) return false;
  }
  return true;
}

}  // namespace

double max_constraint_violation(const ProblemSpec& p, const Vector& x) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.num_constraints(); ++i) {
    const double v = expr::eval_value(p.constraint(i), x);
    worst = std::max(worst, p.is_equality(i) ? std::abs(v) : std::max(v, 0.0));
  }
  return worst;
}

DescentWitness descent_witness(const ProblemSpec& p, const Vector& x, const kkt::ActiveSet& active,
                               double nu, const NewtonConfig& cfg, const kkt::Tolerances& tol) {
  if (!(nu > 0.0)) throw InputError("descent witness needs nu > 0");
  if (!kkt::feasibility_check(p, x, tol.feasibility).feasible) {
    throw PreconditionFailed("descent witness needs a feasible candidate point");
  }

  std::vector<expr::Expr> family{p.objective()};
  for (auto& e : active_family(p, active)) family.push_back(std::move(e));

  Matrix rows(static_cast<Eigen::Index>(family.size()), static_cast<Eigen::Index>(p.dimension()));
  for (std::size_t i = 0; i < family.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = expr::eval_gradient(family[i], x).gradient;
  }
  if (!linalg::rank_with_tolerance(rows, tol.rank).independent) {
    throw DependentFamily(
        "objective gradient is dependent on the active constraint gradients; "
        "no descent witness from this construction");
  }

  const linalg::DualBasis basis = linalg::dual_basis(rows, tol.rank);
  const ChartMap phi(p, family, x, basis.vectors());
  DescentWitness w;
  require_identity(phi, w.jacobian_identity_deviation);

  const double f0 = expr::eval_value(p.objective(), x);
  double target_nu = nu;
  for (int halving = 0; halving <= kMaxTargetHalvings; ++halving, target_nu *= 0.5) {
    Vector target = Vector::Zero(static_cast<Eigen::Index>(family.size()));
    target[0] = f0 - target_nu;
    NewtonResult solved;
    try {
      solved = newton_inverse(phi, target, cfg);
    } catch (const NoConvergence&) {
      continue;
    } catch (const JacobianSingular&) {
      continue;
    }
    const Vector y = phi.point(solved.t);
    bool ok = false;
    try {
      ok = p.in_domain(y) && inactive_strictly_satisfied(p, active, y);
    } catch (const DomainError&) {
      ok = false;
    }
    if (!ok) continue;

    w.nu = target_nu;
    w.nu_halvings = halving;
    w.x_nu = y;
    w.t_nu = solved.t;
    w.newton_iters = solved.iterations;
    w.objective_drop = f0 - expr::eval_value(p.objective(), y);
    w.max_constraint_violation = max_constraint_violation(p, y);
    return w;
  }
  throw NoConvergence("no descent witness found after " + std::to_string(kMaxTargetHalvings) +
                      " halvings of nu");
}

Curve constraint_curve(const ProblemSpec& p, const Vector& x, const kkt::ActiveSet& active,
                       std::size_t j0, const std::vector<double>& epsilons,
                       const NewtonConfig& cfg, double tol_rank) {
  if (j0 >= p.num_inequalities()) {
    throw PreconditionFailed("inequality index " + std::to_string(j0 + 1) + " out of range");
  }
  const auto slot = active.position(p.num_equalities() + j0);
  if (!slot) {
    throw PreconditionFailed("inequality " + std::to_string(j0 + 1) + " is not active");
  }

  const Matrix rows = kkt::constraint_gradients(p, x, active.indices);
  if (!linalg::rank_with_tolerance(rows, tol_rank).independent) {
    throw LicqFailure("active constraint gradients are dependent");
  }
  const linalg::DualBasis basis = linalg::dual_basis(rows, tol_rank);
  const ChartMap phi(p, active_family(p, active), x, basis.vectors());

  Curve curve;
  curve.j0 = j0;
  curve.base = x;
  curve.w_j0 = basis.vector(*slot);
  require_identity(phi, curve.jacobian_identity_deviation);

  const double f0 = expr::eval_value(p.objective(), x);
  double smallest_positive = 0.0;
  for (double eps : epsilons) {
    Vector target = Vector::Zero(static_cast<Eigen::Index>(active.size()));
    target[static_cast<Eigen::Index>(*slot)] = -eps;
    const NewtonResult solved = newton_inverse(phi, target, cfg);
    Vector y = phi.point(solved.t);

    curve.epsilons.push_back(eps);
    curve.newton_iters.push_back(solved.iterations);
    if (eps > 0.0 && (smallest_positive == 0.0 || eps < smallest_positive)) {
      smallest_positive = eps;
      curve.slope_estimate = (expr::eval_value(p.objective(), y) - f0) / eps;
    }
    curve.points.push_back(std::move(y));
  }
  return curve;
}

SlopeEstimate directional_slope(const ProblemSpec& p, const Curve& curve) {
  const auto has_zero =
      std::find(curve.epsilons.begin(), curve.epsilons.end(), 0.0) != curve.epsilons.end();
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < curve.epsilons.size(); ++k) {
    if (curve.epsilons[k] > 0.0 && (!best || curve.epsilons[k] < curve.epsilons[*best])) best = k;
  }
  if (!has_zero || !best) {
    throw PreconditionFailed("directional slope needs the curve sampled at eps = 0 and some eps > 0");
  }

  const auto base = expr::eval_gradient(p.objective(), curve.base);
  SlopeEstimate out;
  out.eps = curve.epsilons[*best];
  out.forward_difference =
      (expr::eval_value(p.objective(), curve.points[*best]) - base.value) / out.eps;
  out.analytic = -base.gradient.dot(curve.w_j0);
  return out;
}

SignWitness sign_witness(const ProblemSpec& p, const Vector& x, const kkt::ActiveSet& active,
                         std::size_t j0, const NewtonConfig& cfg, const kkt::Tolerances& tol,
                         double initial_eps) {
  if (j0 >= p.num_inequalities()) {
    throw PreconditionFailed("inequality index " + std::to_string(j0 + 1) + " out of range");
  }
  if (!(initial_eps > 0.0)) throw InputError("sign witness needs a positive initial eps");

  const kkt::MultiplierSolution sol = kkt::solve_multipliers(p, x, active, tol.rank);
  const double mu = sol.multipliers.mu[static_cast<Eigen::Index>(j0)];
  if (!(mu < -tol.sign)) {
    throw PreconditionFailed("mu_" + std::to_string(j0 + 1) + " = " + std::to_string(mu) +
                             " is not negative; no sign witness applies");
  }

  const double f0 = expr::eval_value(p.objective(), x);
  for (double eps = initial_eps; eps >= kMinSignEps; eps *= 0.5) {
    Curve curve;
    try {
      curve = constraint_curve(p, x, active, j0, {eps}, cfg, tol.rank);
    } catch (const NoConvergence&) {
      continue;
    } catch (const JacobianSingular&) {
      continue;
    }
    const Vector& y = curve.points.front();
    double violation = 0.0;
    double fy = 0.0;
    try {
      if (!p.in_domain(y)) continue;
      violation = max_constraint_violation(p, y);
      fy = expr::eval_value(p.objective(), y);
    } catch (const DomainError&) {
      continue;
    }
    if (violation <= tol.feasibility && fy <= f0 - 0.25 * std::abs(mu) * eps) {
      SignWitness w;
      w.j0 = j0;
      w.mu_j0 = mu;
      w.eps = eps;
      w.point = y;
      w.objective_drop = f0 - fy;
      w.max_constraint_violation = violation;
      w.newton_iters = curve.newton_iters.front();
      return w;
    }
  }
  throw NoDescentFound("no descent along the curve of inequality " + std::to_string(j0 + 1) +
                       " down to eps = 1e-12");
}

}  // namespace kktcert::witness
