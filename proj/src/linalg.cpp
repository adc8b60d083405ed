#include "kktcert/linalg.hpp"

#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "kktcert/errors.hpp"

namespace kktcert::linalg {

RankReport rank_with_tolerance(const Matrix& m, double tol) {
  if (!(tol > 0.0)) throw InputError("rank tolerance must be positive");
  if (!m.allFinite()) throw DomainError("matrix has non-finite entries");

  RankReport report;
  report.relative_tolerance = tol;
  if (m.rows() == 0 || m.cols() == 0) {
    report.independent = m.rows() == 0;
    return report;
  }

  const Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  report.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double largest = sv.size() > 0 ? sv[0] : 0.0;
  report.threshold = tol * largest;
  if (largest > 0.0) {
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv[i] > report.threshold) ++report.numerical_rank;
    }
  }
  report.independent = report.numerical_rank == static_cast<std::size_t>(m.rows());
  return report;
}

Vector least_squares_min_norm(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) {
    throw DimensionMismatch("least squares: matrix has " + std::to_string(a.rows()) +
                            " rows, right-hand side has " + std::to_string(b.size()));
  }
  if (!a.allFinite() || !b.allFinite()) throw DomainError("least squares: non-finite input");
  if (a.rows() == 0 || a.cols() == 0) return Vector::Zero(a.cols());
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  return cod.solve(b);
}

double DualBasis::max_pairing_error(const Matrix& functionals) const {
  if (functionals.rows() == 0) return 0.0;
  const Matrix pairing = functionals * vectors_;
  return (pairing - Matrix::Identity(pairing.rows(), pairing.cols())).cwiseAbs().maxCoeff();
}

DualBasis dual_basis(const Matrix& functionals, double tol) {
  const Eigen::Index k = functionals.rows();
  const Eigen::Index d = functionals.cols();
  const RankReport rank = rank_with_tolerance(functionals, tol);
  if (!rank.independent) {
    throw RankDeficient("dual basis needs independent functionals: rank " +
                        std::to_string(rank.numerical_rank) + " of " + std::to_string(k));
  }
  if (k == 0) return DualBasis(Matrix(d, 0));

  // T^T = Q R with Q (d x k) orthonormal and R (k x k) upper triangular, so
  // T = R^T Q^T and V = Q R^{-T} gives T V = R^T R^{-T} = I, with range(V) =
  // range(Q) = row space of T.
  const Eigen::HouseholderQR<Matrix> qr(functionals.transpose());
  const Matrix q = qr.householderQ() * Matrix::Identity(d, k);
  const Matrix r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  // V^T = R^{-1} Q^T by back substitution.
  const Matrix vt = r.triangularView<Eigen::Upper>().solve(q.transpose());
  return DualBasis(vt.transpose());
}

}  // namespace kktcert::linalg
