#include "kktcert/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "kktcert/dual.hpp"
#include "kktcert/errors.hpp"

namespace kktcert::expr {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), end};
}

std::string_view binary_name(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return "Add";
    case BinaryOp::kSub: return "Sub";
    case BinaryOp::kMul: return "Mul";
    case BinaryOp::kDiv: return "Div";
    case BinaryOp::kPow: return "Pow";
  }
  return "?";
}

std::string_view binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return " + ";
    case BinaryOp::kSub: return " - ";
    case BinaryOp::kMul: return " * ";
    case BinaryOp::kDiv: return " / ";
    case BinaryOp::kPow: return "^";
  }
  return "?";
}

// Exponents with |k| above this fall back to std::pow.
constexpr double kMaxIntegerExponent = 1u << 30;

std::optional<std::int64_t> integer_exponent(const Expr& exponent) {
  if (!exponent.is_constant()) return std::nullopt;
  const double k = eval_value(exponent, Eigen::VectorXd());
  if (std::trunc(k) != k || std::abs(k) > kMaxIntegerExponent) return std::nullopt;
  return static_cast<std::int64_t>(k);
}

// Scalar policies for the shared evaluator.
struct RealPolicy {
  using Scalar = double;
  const Eigen::VectorXd& x;

  Scalar constant(double v) const { return v; }
  Scalar variable(std::size_t k) const { return x[static_cast<Eigen::Index>(k)]; }
  static double value(Scalar s) { return s; }
  static bool derivatives() { return false; }
};

struct DualPolicy {
  using Scalar = Dual;
  const Eigen::VectorXd& x;

  Scalar constant(double v) const { return Dual::constant(v, static_cast<std::size_t>(x.size())); }
  Scalar variable(std::size_t k) const {
    return Dual::variable(x[static_cast<Eigen::Index>(k)], k, static_cast<std::size_t>(x.size()));
  }
  static double value(const Scalar& s) { return s.value; }
  static bool derivatives() { return true; }
};

template <class Policy>
class Evaluator {
 public:
  using Scalar = typename Policy::Scalar;

  explicit Evaluator(Policy policy) : policy_(policy) {}

  Scalar operator()(const Expr& e) const {
    return std::visit(
        Overloaded{
            [&](const Literal& n) { return policy_.constant(n.value); },
            [&](const Variable& n) { return policy_.variable(n.index); },
            [&](const Negate& n) { return Scalar(-(*this)(n.operand)); },
            [&](const Binary& n) { return binary(n); },
            [&](const Call& n) { return call(n); },
        },
        e.node());
  }

 private:
  Scalar binary(const Binary& n) const {
    using std::pow;
    if (n.op == BinaryOp::kPow) {
      Scalar base = (*this)(n.lhs);
      if (auto k = integer_exponent(n.rhs)) return integer_power(std::move(base), *k);
      if (!(Policy::value(base) > 0.0)) {
        throw DomainError("non-integer power of non-positive base " +
                          format_number(Policy::value(base)));
      }
      return pow(base, (*this)(n.rhs));
    }
    Scalar a = (*this)(n.lhs);
    Scalar b = (*this)(n.rhs);
    switch (n.op) {
      case BinaryOp::kAdd: return a + b;
      case BinaryOp::kSub: return a - b;
      case BinaryOp::kMul: return a * b;
      case BinaryOp::kDiv:
        if (Policy::value(b) == 0.0) throw DomainError("division by zero");
        return a / b;
      case BinaryOp::kPow: break;
    }
    return a;
  }

  Scalar integer_power(Scalar base, std::int64_t k) const {
    const bool invert = k < 0;
    auto n = static_cast<std::uint64_t>(invert ? -k : k);
    Scalar result = policy_.constant(1.0);
    while (n != 0) {
      if (n & 1u) result = result * base;
      n >>= 1u;
      if (n != 0) base = base * base;
    }
    if (invert) {
      if (Policy::value(result) == 0.0) throw DomainError("division by zero in negative power");
      return policy_.constant(1.0) / result;
    }
    return result;
  }

  Scalar call(const Call& n) const {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    Scalar a = (*this)(n.arg);
    const double v = Policy::value(a);
    switch (n.fn) {
      case Function::kSin: return sin(a);
      case Function::kCos: return cos(a);
      case Function::kExp: return exp(a);
      case Function::kLog:
        if (!(v > 0.0)) throw DomainError("log of non-positive value " + format_number(v));
        return log(a);
      case Function::kSqrt:
        if (v < 0.0) throw DomainError("sqrt of negative value " + format_number(v));
        if (Policy::derivatives() && v == 0.0) {
          throw DomainError("sqrt is not differentiable at 0");
        }
        return sqrt(a);
    }
    return a;
  }

  Policy policy_;
};

void check_point(const Expr& e, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) < e.required_dimension()) {
    throw DimensionMismatch("expression needs " + std::to_string(e.required_dimension()) +
                            " coordinates, point has " + std::to_string(x.size()));
  }
}

}  // namespace

Expr Expr::literal(double value) { return Expr(std::make_shared<const Node>(Literal{value})); }

Expr Expr::variable(std::size_t index) {
  return Expr(std::make_shared<const Node>(Variable{index}));
}

Expr Expr::negate(Expr operand) {
  return Expr(std::make_shared<const Node>(Negate{std::move(operand)}));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Binary{op, std::move(lhs), std::move(rhs)}));
}

Expr Expr::call(Function fn, Expr arg) {
  return Expr(std::make_shared<const Node>(Call{fn, std::move(arg)}));
}

bool Expr::is_constant() const { return required_dimension() == 0; }

std::size_t Expr::required_dimension() const {
  return std::visit(
      Overloaded{
          [](const Literal&) -> std::size_t { return 0; },
          [](const Variable& n) -> std::size_t { return n.index + 1; },
          [](const Negate& n) { return n.operand.required_dimension(); },
          [](const Binary& n) {
            return std::max(n.lhs.required_dimension(), n.rhs.required_dimension());
          },
          [](const Call& n) { return n.arg.required_dimension(); },
      },
      node());
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& na = a.node();
  const auto& nb = b.node();
  if (na.index() != nb.index()) return false;
  return std::visit(
      Overloaded{
          [&](const Literal& l) { return l.value == std::get<Literal>(nb).value; },
          [&](const Variable& v) { return v.index == std::get<Variable>(nb).index; },
          [&](const Negate& n) { return n.operand == std::get<Negate>(nb).operand; },
          [&](const Binary& n) {
            const auto& o = std::get<Binary>(nb);
            return n.op == o.op && n.lhs == o.lhs && n.rhs == o.rhs;
          },
          [&](const Call& c) {
            const auto& o = std::get<Call>(nb);
            return c.fn == o.fn && c.arg == o.arg;
          },
      },
      na);
}

std::string_view function_name(Function fn) {
  switch (fn) {
    case Function::kSin: return "sin";
    case Function::kCos: return "cos";
    case Function::kExp: return "exp";
    case Function::kLog: return "log";
    case Function::kSqrt: return "sqrt";
  }
  return "?";
}

std::string to_string(const Expr& e) {
  return std::visit(
      Overloaded{
          [](const Literal& n) { return format_number(n.value); },
          [](const Variable& n) { return "Var " + std::to_string(n.index); },
          [](const Negate& n) { return "Neg(" + to_string(n.operand) + ")"; },
          [](const Binary& n) {
            return std::string(binary_name(n.op)) + "(" + to_string(n.lhs) + ", " +
                   to_string(n.rhs) + ")";
          },
          [](const Call& n) {
            return std::string(function_name(n.fn)) + "(" + to_string(n.arg) + ")";
          },
      },
      e.node());
}

std::string to_infix(const Expr& e) {
  return std::visit(
      Overloaded{
          [](const Literal& n) {
            return n.value < 0 ? "(" + format_number(n.value) + ")" : format_number(n.value);
          },
          [](const Variable& n) { return "x" + std::to_string(n.index); },
          [](const Negate& n) { return "(-" + to_infix(n.operand) + ")"; },
          [](const Binary& n) {
            return "(" + to_infix(n.lhs) + std::string(binary_symbol(n.op)) + to_infix(n.rhs) +
                   ")";
          },
          [](const Call& n) {
            return std::string(function_name(n.fn)) + "(" + to_infix(n.arg) + ")";
          },
      },
      e.node());
}

double eval_value(const Expr& e, const Eigen::VectorXd& x) {
  check_point(e, x);
  const double v = Evaluator<RealPolicy>(RealPolicy{x})(e);
  if (!std::isfinite(v)) throw DomainError("non-finite value " + format_number(v));
  return v;
}

ValueGradient eval_gradient(const Expr& e, const Eigen::VectorXd& x) {
  check_point(e, x);
  Dual d = Evaluator<DualPolicy>(DualPolicy{x})(e);
  if (!std::isfinite(d.value) || !d.partials.allFinite()) {
    throw DomainError("non-finite value or gradient");
  }
  return {d.value, std::move(d.partials)};
}

}  // namespace kktcert::expr
