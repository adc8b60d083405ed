#include <cctype>
#include <charconv>
#include <numbers>
#include <string>
#include <string_view>

#include "kktcert/errors.hpp"
#include "kktcert/expr.hpp"

namespace kktcert::expr {

namespace {

// Recursive-descent parser:
//
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' sum ')' | '(' sum ')'
//
// Taking `unary` as the exponent makes `^` right associative and lets
// `2^-1` parse, while `-x0^2` stays `-(x0^2)`.
class Parser {
 public:
  Parser(std::string_view text, std::size_t dimension) : text_(text), dimension_(dimension) {}

  Expr parse() {
    Expr e = sum();
    skip_space();
    if (!at_end()) fail("unexpected '" + std::string(1, peek()) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_space() {
    while (!at_end()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (!at_end() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool accept(char c) {
    skip_space();
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  Expr sum() {
    Expr lhs = product();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(BinaryOp::kAdd, std::move(lhs), product());
      } else if (accept('-')) {
        lhs = Expr::binary(BinaryOp::kSub, std::move(lhs), product());
      } else {
        return lhs;
      }
    }
  }

  Expr product() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(BinaryOp::kMul, std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = Expr::binary(BinaryOp::kDiv, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return Expr::negate(unary());
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return Expr::binary(BinaryOp::kPow, std::move(base), unary());
    return base;
  }

  Expr primary() {
    skip_space();
    if (at_end()) fail("unexpected end of input");
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr inner = sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value,
                                     std::chars_format::general);
    if (ec != std::errc()) fail("malformed number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    if (!at_end() && (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::literal(value);
  }

  Expr name() {
    const std::size_t start = pos_;
    while (!at_end() &&
           (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
      ++pos_;
    }
    const std::string_view word = text_.substr(start, pos_ - start);

    if (word == "pi") return Expr::literal(std::numbers::pi);
    if (word == "e") return Expr::literal(std::numbers::e);

    static constexpr std::pair<std::string_view, Function> kFunctions[] = {
        {"sin", Function::kSin}, {"cos", Function::kCos},   {"exp", Function::kExp},
        {"log", Function::kLog}, {"sqrt", Function::kSqrt},
    };
    for (const auto& [fname, fn] : kFunctions) {
      if (word != fname) continue;
      if (!accept('(')) fail("expected '(' after " + std::string(fname));
      Expr arg = sum();
      if (!accept(')')) fail("expected ')'");
      return Expr::call(fn, std::move(arg));
    }

    if (word.size() > 1 && word[0] == 'x') {
      std::size_t index = 0;
      const auto digits = word.substr(1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
      if (ec == std::errc() && ptr == digits.data() + digits.size() &&
          (digits.size() == 1 || digits[0] != '0')) {
        if (index >= dimension_) {
          pos_ = start;
          fail("variable index out of range: " + std::string(word) + " with " +
               std::to_string(dimension_) + " variables");
        }
        return Expr::variable(index);
      }
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(word) + "'");
  }

  std::string_view text_;
  std::size_t dimension_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text, std::size_t dimension) {
  return Parser(text, dimension).parse();
}

}  // namespace kktcert::expr
