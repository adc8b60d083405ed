#include "kktcert/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "kktcert/errors.hpp"

namespace kktcert::oracle {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double max_abs_value(const ProblemSpec& p, const Vector& x, const std::vector<std::size_t>& rows) {
  double worst = 0.0;
  for (std::size_t i : rows) worst = std::max(worst, std::abs(expr::eval_value(p.constraint(i), x)));
  return worst;
}

struct SampleOutcome {
  bool accepted = false;
  double value = 0.0;
  Vector point;
};

struct Best {
  std::size_t accepted = 0;
  // kNone until a sample is accepted.
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t index = kNone;
  double value = 0.0;

  bool found() const { return index != kNone; }
  Vector point;

  void offer(std::size_t i, SampleOutcome&& s) {
    if (!s.accepted) return;
    ++accepted;
    if (!found() || s.value < value || (s.value == value && i < index)) {
      index = i;
      value = s.value;
      point = std::move(s.point);
    }
  }

  void merge(Best&& other) {
    accepted += other.accepted;
    if (!other.found()) return;
    if (!found() || other.value < value || (other.value == value && other.index < index)) {
      index = other.index;
      value = other.value;
      point = std::move(other.point);
    }
  }
};

class Prober {
 public:
  Prober(const ProblemSpec& p, const Vector& x, double radius, std::uint64_t seed,
         const ProbeOptions& options)
      : p_(p), x_(x), radius_(radius), seed_(seed), options_(options) {
    active_ = kkt::active_set(p, x, options.tol_active);
    for (std::size_t i = 0; i < p.num_equalities(); ++i) equalities_.indices.push_back(i);
  }

  SampleOutcome run(std::size_t index) const {
    SampleOutcome out;
    try {
      Vector y = draw(index);
      if (!equalities_.empty()) y = project_feasible(p_, y, equalities_, options_.projection).point;

      kkt::ActiveSet held = equalities_;
      for (std::size_t i : active_.indices) {
        if (!p_.is_equality(i) && expr::eval_value(p_.constraint(i), y) > 0.0) {
          held.indices.push_back(i);
        }
      }
      if (held.size() > equalities_.size()) {
        y = project_feasible(p_, y, held, options_.projection).point;
      }

      if (!p_.in_domain(y)) return out;
      for (std::size_t i = 0; i < p_.num_constraints(); ++i) {
        const double v = expr::eval_value(p_.constraint(i), y);
        if (p_.is_equality(i) ? !(std::abs(v) <= options_.tol_feas) : !(v <= 0.0)) return out;
      }
      out.value = expr::eval_value(p_.objective(), y);
      out.point = std::move(y);
      out.accepted = true;
    } catch (const Error&) {
      out.accepted = false;
    }
    return out;
  }

 private:
  Vector draw(std::size_t index) const {
    SplitMix64 rng(SplitMix64::stream(seed_, index));
    const auto d = static_cast<Eigen::Index>(p_.dimension());
    Vector direction(d);
    for (Eigen::Index k = 0; k < d; ++k) direction[k] = rng.normal();
    const double norm = direction.norm();
    if (norm == 0.0) {
      direction = Vector::Unit(d, 0);
    } else {
      direction /= norm;
    }
    const double r = radius_ * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    return x_ + r * direction;
  }

  const ProblemSpec& p_;
  const Vector& x_;
  double radius_;
  std::uint64_t seed_;
  const ProbeOptions& options_;
  kkt::ActiveSet active_;
  kkt::ActiveSet equalities_;
};

}  // namespace

Vector finite_diff_gradient(const expr::Expr& e, const Vector& x, double h) {
  if (!(h > 0.0)) throw InputError("finite difference step must be positive");
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    probe[k] = x[k] + h;
    const double forward = expr::eval_value(e, probe);
    probe[k] = x[k] - h;
    const double backward = expr::eval_value(e, probe);
    probe[k] = x[k];
    g[k] = (forward - backward) / (2.0 * h);
  }
  return g;
}

Projection project_feasible(const ProblemSpec& p, const Vector& x0, const kkt::ActiveSet& active,
                            const witness::NewtonConfig& cfg) {
  cfg.validate();
  Projection out{x0, 0};
  if (active.empty()) return out;
  for (;;) {
    if (max_abs_value(p, out.point, active.indices) <= kProjectionTolerance) return out;
    if (out.iterations >= cfg.max_iters) {
      throw NoConvergence("feasibility projection did not converge in " +
                          std::to_string(cfg.max_iters) + " iterations");
    }
    Vector residual(static_cast<Eigen::Index>(active.size()));
    for (std::size_t r = 0; r < active.size(); ++r) {
      residual[static_cast<Eigen::Index>(r)] =
          expr::eval_value(p.constraint(active.indices[r]), out.point);
    }
    const linalg::Matrix g = kkt::constraint_gradients(p, out.point, active.indices);
    out.point -= linalg::least_squares_min_norm(g, residual);
    if (!out.point.allFinite()) throw NoConvergence("feasibility projection diverged");
    ++out.iterations;
  }
}

std::uint64_t SplitMix64::next() {
  state_ += kGolden;
  return mix64(state_);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t SplitMix64::stream(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + kGolden));
}

ProbeResult local_min_probe(const ProblemSpec& p, const Vector& x, double radius,
                            std::size_t samples, std::uint64_t seed, const ProbeOptions& options) {
  if (!(radius > 0.0)) throw InputError("probe radius must be positive");
  if (!kkt::feasibility_check(p, x, options.tol_feas).feasible) {
    throw PreconditionFailed("probe needs a feasible candidate point");
  }

  ProbeResult result;
  result.samples_tested = samples;
  result.radius = radius;
  result.seed = seed;
  result.reference_value = expr::eval_value(p.objective(), x);
  result.tol_probe = options.tol_probe.value_or(1e-10 * (1.0 + std::abs(result.reference_value)));

  const Prober prober(p, x, radius, seed, options);
  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(samples, 1)));

  std::vector<Best> partial(threads);
  auto work = [&](unsigned t) {
    const std::size_t begin = samples * t / threads;
    const std::size_t end = samples * (t + 1) / threads;
    for (std::size_t i = begin; i < end; ++i) partial[t].offer(i, prober.run(i));
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }

  Best best;
  for (auto& part : partial) best.merge(std::move(part));
  result.samples_accepted = best.accepted;
  if (best.found()) {
    result.best_feasible_value = best.value;
    if (best.value < result.reference_value - result.tol_probe) {
      result.counterexample = Counterexample{std::move(best.point), best.value, best.index};
    }
  }
  return result;
}

}  // namespace kktcert::oracle
