#pragma once

#include <cmath>
#include <cstddef>

#include <Eigen/Core>

namespace kktcert::expr {

/// Forward-mode dual scalar carrying a value and its gradient with respect to
/// all d coordinates of the evaluation point.
///
/// Arithmetic propagates partials by the sum, product, quotient and chain
/// rules. Domain checks (log, sqrt, division) live in the evaluator, not here.
struct Dual {
  double value = 0.0;
  Eigen::VectorXd partials;

  Dual() = default;
  Dual(double v, Eigen::VectorXd p) : value(v), partials(std::move(p)) {}

  static Dual constant(double v, std::size_t dim) {
    return {v, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))};
  }

  static Dual variable(double v, std::size_t index, std::size_t dim) {
    Dual out = constant(v, dim);
    out.partials[static_cast<Eigen::Index>(index)] = 1.0;
    return out;
  }
};

inline Dual operator-(const Dual& a) { return {-a.value, -a.partials}; }

inline Dual operator+(const Dual& a, const Dual& b) {
  return {a.value + b.value, a.partials + b.partials};
}

inline Dual operator-(const Dual& a, const Dual& b) {
  return {a.value - b.value, a.partials - b.partials};
}

inline Dual operator*(const Dual& a, const Dual& b) {
  return {a.value * b.value, b.value * a.partials + a.value * b.partials};
}

inline Dual operator/(const Dual& a, const Dual& b) {
  const double q = a.value / b.value;
  return {q, (a.partials - q * b.partials) / b.value};
}

inline Dual sin(const Dual& a) { return {std::sin(a.value), std::cos(a.value) * a.partials}; }

inline Dual cos(const Dual& a) { return {std::cos(a.value), -std::sin(a.value) * a.partials}; }

inline Dual exp(const Dual& a) {
  const double e = std::exp(a.value);
  return {e, e * a.partials};
}

inline Dual log(const Dual& a) { return {std::log(a.value), a.partials / a.value}; }

inline Dual sqrt(const Dual& a) {
  const double r = std::sqrt(a.value);
  return {r, a.partials / (2.0 * r)};
}

// a^b for a > 0 and arbitrary b: d(a^b) = b a^(b-1) da + a^b ln(a) db.
inline Dual pow(const Dual& a, const Dual& b) {
  const double p = std::pow(a.value, b.value);
  return {p, (b.value * std::pow(a.value, b.value - 1.0)) * a.partials +
                 (p * std::log(a.value)) * b.partials};
}

}  // namespace kktcert::expr
