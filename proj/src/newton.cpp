#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "kktcert/errors.hpp"
#include "kktcert/witness.hpp"

namespace kktcert::witness {

void NewtonConfig::validate() const {
  if (max_iters <= 0 || !(tol_residual > 0.0) || !(max_step_radius > 0.0) || max_halvings <= 0 ||
      !(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw InputError("invalid Newton configuration");
  }
}

NewtonResult newton_inverse(const SmoothMap& f, const Vector& target, const NewtonConfig& cfg) {
  cfg.validate();
  // The residual cannot be pushed below a few ulps of the target's magnitude.
  const double tol = std::max(
      cfg.tol_residual,
      8.0 * std::numeric_limits<double>::epsilon() * (1.0 + target.lpNorm<Eigen::Infinity>()));

  NewtonResult result;
  result.t = Vector::Zero(target.size());
  MapEvaluation current = f(result.t);
  if (current.value.size() != target.size() || current.jacobian.rows() != target.size() ||
      current.jacobian.cols() != target.size()) {
    throw DimensionMismatch("Newton map and target sizes differ");
  }

  for (;;) {
    const Vector r = current.value - target;
    result.residual = r.lpNorm<Eigen::Infinity>();
    if (result.residual <= tol) return result;
    if (result.iterations >= cfg.max_iters) {
      throw NoConvergence("Newton did not converge in " + std::to_string(cfg.max_iters) +
                          " iterations (residual " + std::to_string(result.residual) + ")");
    }

    const Eigen::FullPivLU<Matrix> lu(current.jacobian);
    if (!lu.isInvertible()) {
      throw JacobianSingular("singular Jacobian at Newton iterate " +
                             std::to_string(result.iterations));
    }
    const Vector step = lu.solve(-r);

    const double merit = r.norm();
    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings; ++h, alpha *= cfg.backtrack_factor) {
      const Vector trial = result.t + alpha * step;
      if (trial.norm() > cfg.max_step_radius) continue;
      MapEvaluation eval;
      try {
        eval = f(trial);
      } catch (const DomainError&) {
        continue;
      } catch (const OutsideDomain&) {
        continue;
      }
      if (eval.value.allFinite() && (eval.value - target).norm() < merit) {
        result.t = trial;
        current = std::move(eval);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw NoConvergence("target outside the reachable neighbourhood (radius " +
                          std::to_string(cfg.max_step_radius) + ")");
    }
    ++result.iterations;
  }
}

ChartMap::ChartMap(const ProblemSpec& problem, std::vector<expr::Expr> family, Vector base,
                   Matrix basis)
    : problem_(&problem),
      family_(std::move(family)),
      base_(std::move(base)),
      basis_(std::move(basis)) {
  if (basis_.rows() != base_.size() || static_cast<std::size_t>(basis_.cols()) != family_.size()) {
    throw DimensionMismatch("chart basis must be d x (family size)");
  }
}

MapEvaluation ChartMap::operator()(const Vector& t) const {
  const Vector y = point(t);
  if (!problem_->in_domain(y)) throw OutsideDomain("chart point left the domain box");
  const auto k = static_cast<Eigen::Index>(family_.size());
  MapEvaluation out{Vector(k), Matrix(k, k)};
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto vg = expr::eval_gradient(family_[static_cast<std::size_t>(i)], y);
    out.value[i] = vg.value;
    out.jacobian.row(i) = vg.gradient.transpose() * basis_;
  }
  return out;
}

double ChartMap::identity_deviation() const {
  const Matrix j = (*this)(Vector::Zero(basis_.cols())).jacobian;
  if (j.size() == 0) return 0.0;
  return (j - Matrix::Identity(j.rows(), j.cols())).cwiseAbs().maxCoeff();
}

}  // namespace kktcert::witness
