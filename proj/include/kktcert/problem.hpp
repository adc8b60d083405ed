#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "kktcert/expr.hpp"

namespace kktcert {

/// Open interval (lo, hi); either end may be infinite.
struct Interval {
  double lo;
  double hi;

  bool contains(double v) const { return lo < v && v < hi; }
};

/// minimize f_0(x) subject to f_i(x) = 0 (equalities) and f_i(x) <= 0
/// (inequalities), over an open box in R^d.
///
/// Constraints are addressed by one combined index: equalities first, then
/// inequalities, each in declaration order. Immutable once built.
class ProblemSpec {
 public:
  /// Throws DimensionMismatch if any expression uses a variable >= dimension,
  /// the box or default point has the wrong length, or dimension is 0.
  ProblemSpec(std::size_t dimension, expr::Expr objective, std::vector<expr::Expr> equalities,
              std::vector<expr::Expr> inequalities, std::vector<Interval> domain_box = {},
              std::optional<Eigen::VectorXd> point = std::nullopt);

  std::size_t dimension() const { return dimension_; }
  const expr::Expr& objective() const { return objective_; }
  const std::vector<expr::Expr>& equalities() const { return equalities_; }
  const std::vector<expr::Expr>& inequalities() const { return inequalities_; }

  std::size_t num_equalities() const { return equalities_.size(); }
  std::size_t num_inequalities() const { return inequalities_.size(); }
  std::size_t num_constraints() const { return equalities_.size() + inequalities_.size(); }

  bool is_equality(std::size_t constraint) const { return constraint < equalities_.size(); }
  const expr::Expr& constraint(std::size_t index) const;

  /// Per-coordinate open bounds; (-inf, inf) where none was declared.
  const std::vector<Interval>& domain_box() const { return domain_box_; }
  bool in_domain(const Eigen::VectorXd& x) const;

  const std::optional<Eigen::VectorXd>& point() const { return point_; }

 private:
  std::size_t dimension_;
  expr::Expr objective_;
  std::vector<expr::Expr> equalities_;
  std::vector<expr::Expr> inequalities_;
  std::vector<Interval> domain_box_;
  std::optional<Eigen::VectorXd> point_;
};

/// Parses the line-oriented problem format:
///
///   vars <d>                   first statement, required
///   minimize <expr>            exactly once
///   eq <expr>                  constraint expr = 0
///   ineq <expr>                constraint expr <= 0
///   box <k> <lo> <hi>          open bound on coordinate k (inf/-inf allowed)
///   point <v0> ... <v{d-1}>    default candidate point
///
/// `#` starts a comment. Throws ProblemFormatError (with line number) or
/// ParseError for a bad expression.
ProblemSpec parse_problem_file(std::string_view text);

/// Parses a single real, accepting inf/-inf. Returns nullopt if malformed.
std::optional<double> parse_real(std::string_view token);

}  // namespace kktcert
