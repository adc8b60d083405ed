#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "kktcert/linalg.hpp"
#include "kktcert/problem.hpp"

namespace kktcert::kkt {

using linalg::Matrix;
using linalg::RankReport;
using linalg::Vector;

struct Tolerances {
  double feasibility = 1e-8;
  double active = 1e-8;
  double rank = linalg::kDefaultRankTolerance;
  /// Unset means 1e-8 * (1 + |f_0'(x)|).
  std::optional<double> stationarity;
  double sign = 1e-8;

  double stationarity_for(double objective_gradient_norm) const {
    return stationarity ? *stationarity : 1e-8 * (1.0 + objective_gradient_norm);
  }
};

struct FeasibilityResult {
  bool feasible = false;
  /// max(|f_i| over equalities, max(f_i, 0) over inequalities).
  double max_violation = 0.0;
  /// f_i(x) for every constraint, combined order.
  std::vector<double> constraint_values;
};

/// Throws DimensionMismatch for a wrong-length point and OutsideDomain when x
/// is not strictly inside the domain box.
FeasibilityResult feasibility_check(const ProblemSpec& p, const Vector& x, double tol_feas);

/// Combined constraint indices (0-based, equalities first) active at a point:
/// every equality, plus each inequality with |f_i(x)| <= tolerance.
struct ActiveSet {
  std::vector<std::size_t> indices;
  double tolerance = 0.0;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  bool contains(std::size_t constraint) const;
  /// Row of `constraint` in the active gradient matrix.
  std::optional<std::size_t> position(std::size_t constraint) const;
};

ActiveSet active_set(const ProblemSpec& p, const Vector& x, double tol_active);

/// Rows f_i'(x) for i in `rows`, in order.
Matrix constraint_gradients(const ProblemSpec& p, const Vector& x,
                            const std::vector<std::size_t>& rows);

RankReport licq_check(const ProblemSpec& p, const Vector& x, const ActiveSet& active,
                      double tol_rank = linalg::kDefaultRankTolerance);

struct Multipliers {
  Vector lambda;  // one per equality
  Vector mu;      // one per inequality, exactly 0 when inactive
};

struct MultiplierSolution {
  Multipliers multipliers;
  /// |f_0'(x) + sum lambda_i f_i'(x) + sum mu_j f_{n+j}'(x)|_2
  double stationarity_residual = 0.0;
  Vector objective_gradient;
};

/// Minimum-norm least-squares solve of G c = -f_0'(x) with G's columns the
/// active gradients. Throws LicqFailure when those gradients are dependent.
MultiplierSolution solve_multipliers(const ProblemSpec& p, const Vector& x,
                                     const ActiveSet& active,
                                     double tol_rank = linalg::kDefaultRankTolerance);

enum class Verdict { kKktSatisfied, kStationarityFail, kSignFail, kLicqFail, kInfeasible };

std::string_view to_string(Verdict v);

struct SignViolation {
  std::size_t inequality;  // 0-based among inequalities
  double mu;
};

struct KktReport {
  /// Highest-precedence failure: INFEASIBLE > LICQ_FAIL > STATIONARITY_FAIL >
  /// SIGN_FAIL, or KKT_SATISFIED.
  Verdict verdict = Verdict::kKktSatisfied;
  /// Every failed condition; stationarity and sign failures may co-occur.
  std::vector<Verdict> failed_conditions;

  bool feasible = false;
  double max_violation = 0.0;
  std::vector<double> constraint_values;
  double objective_value = 0.0;
  Vector objective_gradient;

  ActiveSet active_set;
  RankReport licq;

  /// Present whenever LICQ holds.
  std::optional<Multipliers> multipliers;
  std::optional<double> stationarity_residual;
  double stationarity_tolerance = 0.0;
  std::vector<SignViolation> sign_violations;
  /// mu_j * f_{n+j}(x) per inequality; exactly 0 for inactive constraints.
  std::vector<double> complementarity;

  /// The tolerances applied, with stationarity resolved to a number.
  Tolerances tolerances;
};

KktReport kkt_report(const ProblemSpec& p, const Vector& x, const Tolerances& tol = {});

}  // namespace kktcert::kkt
