#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace kktcert::linalg {

/// Rows are linear functionals on R^d (typically gradients f_i'(x)).
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultRankTolerance = 1e-10;

struct RankReport {
  std::size_t numerical_rank = 0;
  /// Singular values, descending.
  std::vector<double> singular_values;
  /// Relative tolerance requested.
  double relative_tolerance = kDefaultRankTolerance;
  /// Absolute cut-off actually applied: relative_tolerance * largest singular value.
  double threshold = 0.0;
  /// numerical_rank equals the number of rows.
  bool independent = true;
};

/// Counts singular values strictly above tol * (largest singular value).
/// The zero matrix and the empty matrix have rank 0.
RankReport rank_with_tolerance(const Matrix& m, double tol = kDefaultRankTolerance);

/// Minimum-Euclidean-norm minimiser of |Ax - b|_2.
Vector least_squares_min_norm(const Matrix& a, const Vector& b);

/// Quasi-primal basis of R^d for k independent functionals T_1..T_k:
/// vectors v_1..v_k with T_i(v_j) = delta_ij.
///
/// The canonical choice returned is v_j = T^T (T T^T)^{-1} e_j, i.e. the
/// minimum-norm solution of T v = e_j, so every v_j lies in the row space of T.
class DualBasis {
 public:
  explicit DualBasis(Matrix vectors) : vectors_(std::move(vectors)) {}

  /// d x k, column j is v_j.
  const Matrix& vectors() const { return vectors_; }
  Vector vector(std::size_t j) const { return vectors_.col(static_cast<Eigen::Index>(j)); }
  std::size_t size() const { return static_cast<std::size_t>(vectors_.cols()); }

  /// max_{i,j} |T_i . v_j - delta_ij|.
  double max_pairing_error(const Matrix& functionals) const;

 private:
  Matrix vectors_;
};

/// Throws RankDeficient unless the rows of `functionals` are independent at
/// `tol` (which also requires k <= d).
DualBasis dual_basis(const Matrix& functionals, double tol = kDefaultRankTolerance);

}  // namespace kktcert::linalg
