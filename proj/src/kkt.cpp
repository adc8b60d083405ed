#include "kktcert/kkt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kktcert/errors.hpp"

namespace kktcert::kkt {

namespace {

void check_point(const ProblemSpec& p, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != p.dimension()) {
    throw DimensionMismatch("point has " + std::to_string(x.size()) + " coordinates, problem has " +
                            std::to_string(p.dimension()) + " variables");
  }
  if (!x.allFinite()) throw InputError("point has non-finite coordinates");
  if (!p.in_domain(x)) throw OutsideDomain("point is not strictly inside the domain box");
}

}  // namespace

FeasibilityResult feasibility_check(const ProblemSpec& p, const Vector& x, double tol_feas) {
  check_point(p, x);
  FeasibilityResult result;
  result.constraint_values.reserve(p.num_constraints());
  for (std::size_t i = 0; i < p.num_constraints(); ++i) {
    const double v = expr::eval_value(p.constraint(i), x);
    result.constraint_values.push_back(v);
    const double violation = p.is_equality(i) ? std::abs(v) : std::max(v, 0.0);
    result.max_violation = std::max(result.max_violation, violation);
  }
  result.feasible = result.max_violation <= tol_feas;
  return result;
}

bool ActiveSet::contains(std::size_t constraint) const {
  return std::binary_search(indices.begin(), indices.end(), constraint);
}

std::optional<std::size_t> ActiveSet::position(std::size_t constraint) const {
  const auto it = std::lower_bound(indices.begin(), indices.end(), constraint);
  if (it == indices.end() || *it != constraint) return std::nullopt;
  return static_cast<std::size_t>(it - indices.begin());
}

ActiveSet active_set(const ProblemSpec& p, const Vector& x, double tol_active) {
  check_point(p, x);
  ActiveSet active;
  active.tolerance = tol_active;
  for (std::size_t i = 0; i < p.num_constraints(); ++i) {
    if (p.is_equality(i) || std::abs(expr::eval_value(p.constraint(i), x)) <= tol_active) {
      active.indices.push_back(i);
    }
  }
  return active;
}

Matrix constraint_gradients(const ProblemSpec& p, const Vector& x,
                            const std::vector<std::size_t>& rows) {
  Matrix g(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p.dimension()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    g.row(static_cast<Eigen::Index>(r)) = expr::eval_gradient(p.constraint(rows[r]), x).gradient;
  }
  return g;
}

RankReport licq_check(const ProblemSpec& p, const Vector& x, const ActiveSet& active,
                      double tol_rank) {
  check_point(p, x);
  return linalg::rank_with_tolerance(constraint_gradients(p, x, active.indices), tol_rank);
}

MultiplierSolution solve_multipliers(const ProblemSpec& p, const Vector& x,
                                     const ActiveSet& active, double tol_rank) {
  check_point(p, x);
  const Matrix rows = constraint_gradients(p, x, active.indices);
  const RankReport rank = linalg::rank_with_tolerance(rows, tol_rank);
  if (!rank.independent) {
    throw LicqFailure("active constraint gradients are dependent: rank " +
                      std::to_string(rank.numerical_rank) + " of " +
                      std::to_string(active.size()));
  }

  MultiplierSolution out;
  out.objective_gradient = expr::eval_gradient(p.objective(), x).gradient;
  const Vector coeffs = linalg::least_squares_min_norm(rows.transpose(), -out.objective_gradient);

  out.multipliers.lambda = Vector::Zero(static_cast<Eigen::Index>(p.num_equalities()));
  out.multipliers.mu = Vector::Zero(static_cast<Eigen::Index>(p.num_inequalities()));
  for (std::size_t r = 0; r < active.size(); ++r) {
    const std::size_t i = active.indices[r];
    const double c = coeffs[static_cast<Eigen::Index>(r)];
    if (p.is_equality(i)) {
      out.multipliers.lambda[static_cast<Eigen::Index>(i)] = c;
    } else {
      out.multipliers.mu[static_cast<Eigen::Index>(i - p.num_equalities())] = c;
    }
  }
  out.stationarity_residual = (out.objective_gradient + rows.transpose() * coeffs).norm();
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kKktSatisfied: return "KKT_SATISFIED";
    case Verdict::kStationarityFail: return "STATIONARITY_FAIL";
    case Verdict::kSignFail: return "SIGN_FAIL";
    case Verdict::kLicqFail: return "LICQ_FAIL";
    case Verdict::kInfeasible: return "INFEASIBLE";
  }
  return "?";
}

KktReport kkt_report(const ProblemSpec& p, const Vector& x, const Tolerances& tol) {
  KktReport report;
  report.tolerances = tol;

  const FeasibilityResult feas = feasibility_check(p, x, tol.feasibility);
  report.feasible = feas.feasible;
  report.max_violation = feas.max_violation;
  report.constraint_values = feas.constraint_values;

  const auto objective = expr::eval_gradient(p.objective(), x);
  report.objective_value = objective.value;
  report.objective_gradient = objective.gradient;
  report.stationarity_tolerance = tol.stationarity_for(objective.gradient.norm());
  report.tolerances.stationarity = report.stationarity_tolerance;

  report.active_set = active_set(p, x, tol.active);
  report.licq = licq_check(p, x, report.active_set, tol.rank);
  report.complementarity.assign(p.num_inequalities(), 0.0);

  if (!report.feasible) report.failed_conditions.push_back(Verdict::kInfeasible);
  if (!report.licq.independent) {
    report.failed_conditions.push_back(Verdict::kLicqFail);
  } else {
    const MultiplierSolution sol = solve_multipliers(p, x, report.active_set, tol.rank);
    report.multipliers = sol.multipliers;
    report.stationarity_residual = sol.stationarity_residual;

    const Vector& mu = sol.multipliers.mu;
    for (std::size_t j = 0; j < p.num_inequalities(); ++j) {
      const std::size_t i = p.num_equalities() + j;
      const double mu_j = mu[static_cast<Eigen::Index>(j)];
      if (report.active_set.contains(i)) {
        report.complementarity[j] = mu_j * feas.constraint_values[i];
      }
      if (mu_j < -tol.sign) report.sign_violations.push_back({j, mu_j});
    }
    if (sol.stationarity_residual > report.stationarity_tolerance) {
      report.failed_conditions.push_back(Verdict::kStationarityFail);
    }
    if (!report.sign_violations.empty()) report.failed_conditions.push_back(Verdict::kSignFail);
  }

  report.verdict = report.failed_conditions.empty() ? Verdict::kKktSatisfied
                                                    : report.failed_conditions.front();
  return report;
}

}  // namespace kktcert::kkt
