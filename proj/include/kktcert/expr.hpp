#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Core>

namespace kktcert::expr {

enum class BinaryOp { kAdd, kSub, kMul, kDiv, kPow };
enum class Function { kSin, kCos, kExp, kLog, kSqrt };

struct Literal {
  double value;
};

struct Variable {
  std::size_t index;
};

struct Negate;
struct Binary;
struct Call;

/// Immutable expression tree over the coordinates x0..x{d-1}.
///
/// Copies share structure; nodes are never modified after construction, so an
/// Expr may be evaluated concurrently from any number of threads.
class Expr {
 public:
  using Node = std::variant<Literal, Variable, Negate, Binary, Call>;

  static Expr literal(double value);
  static Expr variable(std::size_t index);
  static Expr negate(Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr call(Function fn, Expr arg);

  const Node& node() const;

  /// True when the tree contains no variable references.
  bool is_constant() const;

  /// Number of coordinates the expression needs: 1 + the largest variable
  /// index, or 0 for constants.
  std::size_t required_dimension() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct Negate {
  Expr operand;
};

struct Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};

struct Call {
  Function fn;
  Expr arg;
};

inline const Expr::Node& Expr::node() const { return *node_; }

/// Structural rendering, e.g. `Sub(Add(Pow(Var 0, 2), Pow(Var 1, 2)), 2)`.
std::string to_string(const Expr& e);

/// Infix rendering that parses back to a structurally equal tree.
std::string to_infix(const Expr& e);

std::string_view function_name(Function fn);

/// Parses an infix expression over `x0`..`x{dimension-1}`.
///
/// Precedence from tightest: `^` (right associative), unary minus, `*` `/`,
/// `+` `-`. Recognised names are `pi`, `e`, and the functions sin, cos, exp,
/// log, sqrt. `#` starts a comment running to end of line. Throws ParseError
/// carrying the byte offset of the offending token.
Expr parse_expression(std::string_view text, std::size_t dimension);

/// Plain real evaluation. Throws DomainError instead of returning NaN for log
/// of a non-positive value, sqrt of a negative value, division by zero, or a
/// non-integer power of a non-positive base.
double eval_value(const Expr& e, const Eigen::VectorXd& x);

struct ValueGradient {
  double value;
  Eigen::VectorXd gradient;
};

/// Value and exact forward-mode gradient at `x`. Same domain rules as
/// eval_value, plus sqrt at 0 is rejected (not differentiable there).
ValueGradient eval_gradient(const Expr& e, const Eigen::VectorXd& x);

}  // namespace kktcert::expr
