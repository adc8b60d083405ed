#include "kktcert/report.hpp"

#include <fmt/format.h>

namespace kktcert::report {

namespace {

Json array(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

template <class T>
Json array(const std::vector<T>& v) {
  Json out = Json::array();
  for (const auto& e : v) out.push_back(e);
  return out;
}

std::string vec(const Eigen::VectorXd& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += real(v[i]);
  }
  return out + ")";
}

}  // namespace

// Adding 0.0 turns -0 into +0 so text output never shows "-0".
std::string real(double v) { return fmt::format("{:.6g}", v + 0.0); }

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json to_json(const ProblemSpec& p, const kkt::KktReport& r) {
  Json doc;
  doc["verdict"] = std::string(kkt::to_string(r.verdict));
  Json failed = Json::array();
  for (auto v : r.failed_conditions) failed.push_back(std::string(kkt::to_string(v)));
  doc["failed_conditions"] = failed;
  doc["feasible"] = r.feasible;
  doc["max_violation"] = r.max_violation;
  doc["objective_value"] = r.objective_value;
  doc["objective_gradient"] = array(r.objective_gradient);
  doc["constraint_values"] = array(r.constraint_values);

  Json active = Json::array();
  for (std::size_t i : r.active_set.indices) active.push_back(i + 1);
  doc["active_set"] = active;
  doc["licq_rank"] = r.licq.numerical_rank;
  doc["licq_independent"] = r.licq.independent;
  doc["singular_values"] = array(r.licq.singular_values);

  if (r.multipliers) {
    doc["lambda"] = array(r.multipliers->lambda);
    doc["mu"] = array(r.multipliers->mu);
  } else {
    doc["lambda"] = nullptr;
    doc["mu"] = nullptr;
  }
  doc["stationarity_residual"] =
      r.stationarity_residual ? Json(*r.stationarity_residual) : Json(nullptr);
  doc["stationarity_tolerance"] = r.stationarity_tolerance;

  Json violations = Json::array();
  for (const auto& v : r.sign_violations) {
    violations.push_back(Json{{"j", v.inequality + 1}, {"mu", v.mu}});
  }
  doc["sign_violations"] = violations;
  doc["complementarity"] = array(r.complementarity);
  doc["num_equalities"] = p.num_equalities();
  doc["num_inequalities"] = p.num_inequalities();
  doc["tolerances"] = Json{{"feasibility", r.tolerances.feasibility},
                           {"active", r.tolerances.active},
                           {"rank", r.tolerances.rank},
                           {"stationarity", r.stationarity_tolerance},
                           {"sign", r.tolerances.sign}};
  return doc;
}

Json to_json(const witness::DescentWitness& w) {
  Json doc;
  doc["witness_kind"] = "descent";
  doc["x_nu"] = array(w.x_nu);
  doc["objective_drop"] = w.objective_drop;
  doc["max_constraint_violation"] = w.max_constraint_violation;
  doc["nu"] = w.nu;
  doc["nu_halvings"] = w.nu_halvings;
  doc["t_nu"] = array(w.t_nu);
  doc["newton_iterations"] = w.newton_iters;
  doc["jacobian_identity_deviation"] = w.jacobian_identity_deviation;
  return doc;
}

Json to_json(const witness::SignWitness& w) {
  Json doc;
  doc["witness_kind"] = "sign";
  doc["x_nu"] = array(w.point);
  doc["objective_drop"] = w.objective_drop;
  doc["max_constraint_violation"] = w.max_constraint_violation;
  doc["j0"] = w.j0 + 1;
  doc["mu_j0"] = w.mu_j0;
  doc["eps"] = w.eps;
  doc["newton_iterations"] = w.newton_iters;
  return doc;
}

Json to_json(const witness::Curve& c, const witness::SlopeEstimate* slope) {
  Json doc;
  doc["j0"] = c.j0 + 1;
  doc["w_j0"] = array(c.w_j0);
  doc["epsilons"] = array(c.epsilons);
  Json points = Json::array();
  for (const auto& pt : c.points) points.push_back(array(pt));
  doc["points"] = points;
  doc["newton_iterations"] = array(c.newton_iters);
  doc["jacobian_identity_deviation"] = c.jacobian_identity_deviation;
  doc["slope_estimate"] = c.slope_estimate ? Json(*c.slope_estimate) : Json(nullptr);
  if (slope) {
    doc["slope_eps"] = slope->eps;
    doc["slope_forward_difference"] = slope->forward_difference;
    doc["slope_analytic"] = slope->analytic;
  }
  return doc;
}

Json to_json(const oracle::ProbeResult& r) {
  Json doc;
  doc["samples_tested"] = r.samples_tested;
  doc["samples_accepted"] = r.samples_accepted;
  if (r.counterexample) {
    doc["counterexample"] = Json{{"point", array(r.counterexample->point)},
                                 {"value", r.counterexample->value},
                                 {"sample_index", r.counterexample->sample_index}};
  } else {
    doc["counterexample"] = nullptr;
  }
  doc["best_feasible_value"] =
      r.best_feasible_value ? Json(*r.best_feasible_value) : Json(nullptr);
  doc["reference_value"] = r.reference_value;
  doc["tol_probe"] = r.tol_probe;
  doc["radius"] = r.radius;
  doc["seed"] = r.seed;
  doc["generator"] = std::string(r.generator);
  return doc;
}

std::string format_text(const ProblemSpec& p, const kkt::KktReport& r) {
  std::string out;
  out += fmt::format("verdict: {}\n", kkt::to_string(r.verdict));
  if (r.failed_conditions.size() > 1) {
    std::string all;
    for (auto v : r.failed_conditions) all += (all.empty() ? "" : ", ") + std::string(kkt::to_string(v));
    out += fmt::format("failed conditions: {}\n", all);
  }
  out += fmt::format("objective: f_0 = {}\n", real(r.objective_value));
  out += fmt::format("feasible: {} (max violation {})\n", r.feasible ? "yes" : "no",
                     real(r.max_violation));

  if (p.num_constraints() > 0) out += "constraints:\n";
  for (std::size_t i = 0; i < p.num_constraints(); ++i) {
    const bool eq = p.is_equality(i);
    const bool active = r.active_set.contains(i);
    out += fmt::format("  f_{} = {}  [{}, {}", i + 1, real(r.constraint_values[i]),
                       eq ? "eq" : "ineq", active ? "active" : "inactive");
    if (!eq) out += fmt::format(", slack {}", real(-r.constraint_values[i]));
    out += "]\n";
  }

  std::string active;
  for (std::size_t i : r.active_set.indices) active += (active.empty() ? "" : ", ") + std::to_string(i + 1);
  out += fmt::format("active set: {{{}}}\n", active);
  out += fmt::format("LICQ: rank {} of {} active gradients ({})\n", r.licq.numerical_rank,
                     r.active_set.size(), r.licq.independent ? "independent" : "dependent");

  if (r.multipliers) {
    out += "multipliers:\n";
    const auto& lambda = r.multipliers->lambda;
    const auto& mu = r.multipliers->mu;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) out += fmt::format("  λ_{} = {}\n", i + 1, real(lambda[i]));
    for (Eigen::Index j = 0; j < mu.size(); ++j) out += fmt::format("  μ_{} = {}\n", j + 1, real(mu[j]));
    out += fmt::format("stationarity residual: {} (tolerance {})\n",
                       real(*r.stationarity_residual), real(r.stationarity_tolerance));
    if (r.sign_violations.empty()) {
      out += "sign violations: none\n";
    } else {
      for (const auto& v : r.sign_violations) {
        out += fmt::format("sign violation: μ_{} = {} < 0\n", v.inequality + 1, real(v.mu));
      }
    }
    for (std::size_t j = 0; j < r.complementarity.size(); ++j) {
      out += fmt::format("complementarity: μ_{}·f_{} = {}\n", j + 1, p.num_equalities() + j + 1,
                         real(r.complementarity[j]));
    }
  } else {
    out += "multipliers: not computed (active gradients dependent)\n";
  }
  return out;
}

std::string format_text(const witness::DescentWitness& w) {
  return fmt::format(
      "descent witness: x_nu = {}\n  nu = {} ({} halvings), objective drop {}\n"
      "  max constraint violation {}, {} Newton iterations\n",
      vec(w.x_nu), real(w.nu), w.nu_halvings, real(w.objective_drop),
      real(w.max_constraint_violation), w.newton_iters);
}

std::string format_text(const witness::SignWitness& w) {
  return fmt::format(
      "sign witness: x_nu = {}\n  relaxing inequality {} (μ_{} = {}) by eps = {}\n"
      "  objective drop {}, max constraint violation {}\n",
      vec(w.point), w.j0 + 1, w.j0 + 1, real(w.mu_j0), real(w.eps), real(w.objective_drop),
      real(w.max_constraint_violation));
}

std::string format_text(const ProblemSpec& p, const witness::Curve& c,
                        const witness::SlopeEstimate* slope) {
  std::string out = fmt::format("curve relaxing inequality {} (f_{}), w = {}\n", c.j0 + 1,
                                p.num_equalities() + c.j0 + 1, vec(c.w_j0));
  for (std::size_t k = 0; k < c.points.size(); ++k) {
    out += fmt::format("  eps = {}: x = {}, f_0 = {}\n", real(c.epsilons[k]), vec(c.points[k]),
                       real(expr::eval_value(p.objective(), c.points[k])));
  }
  if (slope) {
    out += fmt::format("slope at eps = {}: forward difference {}, analytic -f_0'·w = {}\n",
                       real(slope->eps), real(slope->forward_difference), real(slope->analytic));
  }
  return out;
}

std::string format_text(const oracle::ProbeResult& r) {
  std::string out = fmt::format("probe: {} samples ({} accepted), radius {}, seed {} ({})\n",
                                r.samples_tested, r.samples_accepted, real(r.radius), r.seed,
                                r.generator);
  if (r.counterexample) {
    out += fmt::format("counterexample: x = {}, f_0 = {} < {} (sample {})\n",
                       vec(r.counterexample->point), real(r.counterexample->value),
                       real(r.reference_value), r.counterexample->sample_index);
  } else {
    out += "no counterexample found\n";
  }
  return out;
}

}  // namespace kktcert::report
