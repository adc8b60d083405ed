#include "kktcert/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "kktcert/errors.hpp"
#include "kktcert/oracle.hpp"
#include "kktcert/problem.hpp"
#include "kktcert/report.hpp"
#include "kktcert/witness.hpp"

namespace kktcert::cli {

namespace {

using report::Json;

struct Flags {
  std::string point;
  double tol_stat = 0.0;
  std::string eps;
  std::string format = "text";
  std::size_t j0 = 0;
  std::uint64_t seed = 0;
};

void add_flags(CLI::App& sub, RunConfig& cfg, Flags& flags) {
  sub.add_option("problem", cfg.problem_path, "Problem file")->required();
  sub.add_option("--point", flags.point, "Candidate point, comma separated");
  sub.add_option("--tol-active", cfg.tolerances.active, "Active-set tolerance");
  sub.add_option("--tol-feas", cfg.tolerances.feasibility, "Feasibility tolerance");
  sub.add_option("--tol-rank", cfg.tolerances.rank, "Relative rank tolerance");
  sub.add_option("--tol-stat", flags.tol_stat, "Stationarity tolerance [1e-8 (1 + |f_0'|)]");
  sub.add_option("--tol-sign", cfg.tolerances.sign, "Multiplier sign tolerance");
  sub.add_option("--nu", cfg.nu, "Objective decrease targeted by the descent witness");
  sub.add_option("--eps", flags.eps, "Curve parameters, comma separated");
  sub.add_option("--j0", flags.j0, "Inequality (1-based) relaxed by the curve");
  sub.add_option("--radius", cfg.radius, "Probe radius");
  sub.add_option("--samples", cfg.samples, "Probe sample count");
  sub.add_option("--seed", flags.seed, "Probe seed");
  sub.add_option("--format", flags.format, "Output format")
      ->check(CLI::IsMember({"text", "structured"}));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read problem file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string point_text(const Eigen::VectorXd& x) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) out += (i ? ", " : "") + report::real(x[i]);
  return out + ")";
}

std::optional<std::size_t> first_active_inequality(const ProblemSpec& p, const kkt::ActiveSet& a) {
  for (std::size_t i : a.indices) {
    if (!p.is_equality(i)) return i - p.num_equalities();
  }
  return std::nullopt;
}

class Runner {
 public:
  Runner(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

  int operator()() {
    const ProblemSpec problem = parse_problem_file(read_file(cfg_.problem_path));
    Eigen::VectorXd x;
    if (cfg_.point) {
      const auto values = parse_real_list(*cfg_.point);
      x = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    } else if (problem.point()) {
      x = *problem.point();
    } else {
      throw InputError("no candidate point: pass --point or add a point line to the problem file");
    }
    if (static_cast<std::size_t>(x.size()) != problem.dimension()) {
      throw DimensionMismatch("point has " + std::to_string(x.size()) +
                              " coordinates, problem has " + std::to_string(problem.dimension()));
    }

    const kkt::KktReport kkt = kkt::kkt_report(problem, x, cfg_.tolerances);
    doc_["command"] = command_name();
    doc_["problem"] = cfg_.problem_path;
    Json point = Json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) point.push_back(x[i]);
    doc_["point"] = point;
    doc_.update(report::to_json(problem, kkt));
    text_ = "problem: " + cfg_.problem_path + "\npoint: " + point_text(x) + "\n" +
            report::format_text(problem, kkt);

    int code = kSuccess;
    switch (cfg_.command) {
      case Command::kCheck:
        code = kkt.verdict == kkt::Verdict::kKktSatisfied ? kSuccess : kFalsified;
        break;
      case Command::kWitness: code = witness(problem, x, kkt); break;
      case Command::kCurve: code = curve(problem, x, kkt); break;
      case Command::kProbe: code = probe(problem, x, kkt); break;
    }
    emit();
    return code;
  }

 private:
  std::string command_name() const {
    switch (cfg_.command) {
      case Command::kCheck: return "check";
      case Command::kWitness: return "witness";
      case Command::kCurve: return "curve";
      case Command::kProbe: return "probe";
    }
    return "?";
  }

  void emit() {
    if (cfg_.format == Format::kStructured) {
      out_ << report::dump(doc_);
    } else {
      out_ << text_;
    }
  }

  void no_witness(const std::string& why) {
    doc_["witness_kind"] = "none";
    doc_["message"] = why;
    text_ += "no witness construction applies: " + why + "\n";
  }

  int witness(const ProblemSpec& p, const Eigen::VectorXd& x, const kkt::KktReport& kkt) {
    if (!kkt.feasible) {
      no_witness("candidate point is infeasible");
      return kFalsified;
    }
    const witness::NewtonConfig newton;
    const bool stationarity_fails =
        kkt.stationarity_residual && *kkt.stationarity_residual > kkt.stationarity_tolerance;
    const bool sign_fails = !kkt.sign_violations.empty();

    if (stationarity_fails) {
      try {
        const auto w = witness::descent_witness(p, x, kkt.active_set, cfg_.nu, newton, kkt.tolerances);
        doc_.update(report::to_json(w));
        text_ += report::format_text(w);
        return kFalsified;
      } catch (const NumericalError&) {
        if (!sign_fails) throw;
      }
    }
    if (sign_fails) {
      double initial_eps = 1e-2;
      if (const auto it = std::max_element(cfg_.epsilons.begin(), cfg_.epsilons.end());
          it != cfg_.epsilons.end() && *it > 0.0) {
        initial_eps = *it;
      }
      const auto w = witness::sign_witness(p, x, kkt.active_set, kkt.sign_violations.front().inequality,
                                           newton, kkt.tolerances, initial_eps);
      doc_.update(report::to_json(w));
      text_ += report::format_text(w);
      return kFalsified;
    }
    no_witness(kkt.multipliers ? "stationarity and multiplier signs hold"
                               : "active constraint gradients are dependent");
    return kSuccess;
  }

  int curve(const ProblemSpec& p, const Eigen::VectorXd& x, const kkt::KktReport& kkt) {
    if (!kkt.feasible) {
      doc_["message"] = "candidate point is infeasible";
      text_ += "no curve: candidate point is infeasible\n";
      return kFalsified;
    }
    std::size_t j0 = 0;
    if (cfg_.j0) {
      if (*cfg_.j0 == 0) throw InputError("--j0 is 1-based");
      j0 = *cfg_.j0 - 1;
    } else if (const auto first = first_active_inequality(p, kkt.active_set)) {
      j0 = *first;
    } else {
      throw PreconditionFailed("no active inequality to relax; pass --j0");
    }
    if (!kkt.licq.independent) throw LicqFailure("active constraint gradients are dependent");

    const auto c = witness::constraint_curve(p, x, kkt.active_set, j0, cfg_.epsilons, {},
                                             kkt.tolerances.rank);
    std::optional<witness::SlopeEstimate> slope;
    if (std::count(c.epsilons.begin(), c.epsilons.end(), 0.0) > 0 && c.slope_estimate) {
      slope = witness::directional_slope(p, c);
    }
    doc_.update(report::to_json(c, slope ? &*slope : nullptr));
    text_ += report::format_text(p, c, slope ? &*slope : nullptr);
    return kSuccess;
  }

  int probe(const ProblemSpec& p, const Eigen::VectorXd& x, const kkt::KktReport& kkt) {
    if (!kkt.feasible) {
      doc_["message"] = "candidate point is infeasible";
      text_ += "no probe: candidate point is infeasible\n";
      return kFalsified;
    }
    oracle::ProbeOptions options;
    options.tol_feas = kkt.tolerances.feasibility;
    options.tol_active = kkt.tolerances.active;
    const auto result = oracle::local_min_probe(p, x, cfg_.radius, cfg_.samples, cfg_.seed, options);
    doc_.update(report::to_json(result));
    text_ += report::format_text(result);
    return result.counterexample ? kFalsified : kSuccess;
  }

  const RunConfig& cfg_;
  std::ostream& out_;
  Json doc_;
  std::string text_;
};

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const auto v = parse_real(std::string_view(text).substr(start, comma - start));
    if (!v || !std::isfinite(*v)) throw InputError("malformed real list '" + text + "'");
    values.push_back(*v);
    if (comma == text.size()) break;
    start = comma + 1;
  }
  return values;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certify or refute KKT conditions at a candidate point"};
  app.require_subcommand(1);
  RunConfig cfg;
  Flags flags;

  struct Sub {
    Command command;
    const char* name;
    const char* help;
  };
  constexpr Sub kSubs[] = {
      {Command::kCheck, "check", "Evaluate the KKT conditions"},
      {Command::kWitness, "witness", "Construct a feasible point with lower objective"},
      {Command::kCurve, "curve", "Sample the curve relaxing one active inequality"},
      {Command::kProbe, "probe", "Search a neighbourhood for a better feasible point"},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& s : kSubs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_flags(*sub, cfg, flags);
    subs.emplace_back(sub, s.command);
  }

  std::vector<std::string> argv_storage{"kktcert"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    for (const auto& [sub, command] : subs) {
      if (!sub->parsed()) continue;
      cfg.command = command;
      if (sub->count("--point")) cfg.point = flags.point;
      if (sub->count("--tol-stat")) cfg.tolerances.stationarity = flags.tol_stat;
      if (sub->count("--eps")) cfg.epsilons = parse_real_list(flags.eps);
      if (sub->count("--j0")) cfg.j0 = flags.j0;
      cfg.seed = flags.seed;
      cfg.format = flags.format == "structured" ? Format::kStructured : Format::kText;
    }
    return Runner(cfg, out)();
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace kktcert::cli
