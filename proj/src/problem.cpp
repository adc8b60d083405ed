#include "kktcert/problem.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "kktcert/errors.hpp"

namespace kktcert {

namespace {

void check_expression(const expr::Expr& e, std::size_t dimension, std::string_view what) {
  if (e.required_dimension() > dimension) {
    throw DimensionMismatch(std::string(what) + " uses x" +
                            std::to_string(e.required_dimension() - 1) + " but the problem has " +
                            std::to_string(dimension) + " variables");
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) words.push_back(s.substr(start, i - start));
  }
  return words;
}

}  // namespace

std::optional<double> parse_real(std::string_view token) {
  token = trim(token);
  if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

ProblemSpec::ProblemSpec(std::size_t dimension, expr::Expr objective,
                         std::vector<expr::Expr> equalities, std::vector<expr::Expr> inequalities,
                         std::vector<Interval> domain_box, std::optional<Eigen::VectorXd> point)
    : dimension_(dimension),
      objective_(std::move(objective)),
      equalities_(std::move(equalities)),
      inequalities_(std::move(inequalities)),
      domain_box_(std::move(domain_box)),
      point_(std::move(point)) {
  if (dimension_ == 0) throw DimensionMismatch("problem dimension must be at least 1");
  check_expression(objective_, dimension_, "objective");
  for (const auto& e : equalities_) check_expression(e, dimension_, "equality constraint");
  for (const auto& e : inequalities_) check_expression(e, dimension_, "inequality constraint");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (domain_box_.empty()) domain_box_.assign(dimension_, Interval{-kInf, kInf});
  if (domain_box_.size() != dimension_) {
    throw DimensionMismatch("domain box has " + std::to_string(domain_box_.size()) +
                            " intervals for " + std::to_string(dimension_) + " variables");
  }
  for (const auto& iv : domain_box_) {
    if (!(iv.lo < iv.hi)) throw DimensionMismatch("empty domain interval");
  }
  if (point_ && static_cast<std::size_t>(point_->size()) != dimension_) {
    throw DimensionMismatch("default point has " + std::to_string(point_->size()) +
                            " coordinates for " + std::to_string(dimension_) + " variables");
  }
}

const expr::Expr& ProblemSpec::constraint(std::size_t index) const {
  if (index < equalities_.size()) return equalities_[index];
  return inequalities_.at(index - equalities_.size());
}

bool ProblemSpec::in_domain(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension_) return false;
  for (std::size_t k = 0; k < dimension_; ++k) {
    if (!domain_box_[k].contains(x[static_cast<Eigen::Index>(k)])) return false;
  }
  return true;
}

ProblemSpec parse_problem_file(std::string_view text) {
  std::optional<std::size_t> dimension;
  std::optional<expr::Expr> objective;
  std::vector<expr::Expr> equalities;
  std::vector<expr::Expr> inequalities;
  std::vector<Interval> box;
  std::optional<Eigen::VectorXd> point;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t split = std::min(line.find_first_of(" \t"), line.size());
    const std::string_view keyword = line.substr(0, split);
    const std::string_view rest = trim(line.substr(split));

    if (keyword == "vars") {
      if (dimension) throw ProblemFormatError("duplicate vars declaration", line_no);
      std::size_t d = 0;
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), d);
      if (ec != std::errc() || ptr != rest.data() + rest.size() || d == 0) {
        throw ProblemFormatError("vars expects a positive integer", line_no);
      }
      dimension = d;
      constexpr double kInf = std::numeric_limits<double>::infinity();
      box.assign(d, Interval{-kInf, kInf});
      continue;
    }
    if (!dimension) throw ProblemFormatError("missing vars declaration", line_no);

    auto expression = [&](std::string_view what) {
      if (rest.empty()) throw ProblemFormatError(std::string(what) + " needs an expression", line_no);
      try {
        return expr::parse_expression(rest, *dimension);
      } catch (const ParseError& e) {
        throw ProblemFormatError(std::string(what) + ": " + e.what(), line_no);
      }
    };

    if (keyword == "minimize") {
      if (objective) throw ProblemFormatError("duplicate minimize", line_no);
      objective = expression("minimize");
    } else if (keyword == "eq") {
      equalities.push_back(expression("eq"));
    } else if (keyword == "ineq") {
      inequalities.push_back(expression("ineq"));
    } else if (keyword == "box") {
      const auto words = split_words(rest);
      std::size_t k = 0;
      if (words.size() != 3) throw ProblemFormatError("box expects <k> <lo> <hi>", line_no);
      auto [ptr, ec] = std::from_chars(words[0].data(), words[0].data() + words[0].size(), k);
      if (ec != std::errc() || ptr != words[0].data() + words[0].size() || k >= *dimension) {
        throw ProblemFormatError("box coordinate out of range", line_no);
      }
      const auto lo = parse_real(words[1]);
      const auto hi = parse_real(words[2]);
      if (!lo || !hi || !(*lo < *hi)) throw ProblemFormatError("box bounds must satisfy lo < hi", line_no);
      box[k] = Interval{*lo, *hi};
    } else if (keyword == "point") {
      if (point) throw ProblemFormatError("duplicate point", line_no);
      const auto words = split_words(rest);
      if (words.size() != *dimension) {
        throw ProblemFormatError("point expects " + std::to_string(*dimension) + " coordinates",
                                 line_no);
      }
      Eigen::VectorXd p(static_cast<Eigen::Index>(words.size()));
      for (std::size_t i = 0; i < words.size(); ++i) {
        const auto v = parse_real(words[i]);
        if (!v || !std::isfinite(*v)) throw ProblemFormatError("malformed point coordinate", line_no);
        p[static_cast<Eigen::Index>(i)] = *v;
      }
      point = std::move(p);
    } else {
      throw ProblemFormatError("unknown keyword '" + std::string(keyword) + "'", line_no);
    }
  }

  if (!dimension) throw ProblemFormatError("missing vars declaration", 0);
  if (!objective) throw ProblemFormatError("missing minimize line", 0);
  return ProblemSpec(*dimension, std::move(*objective), std::move(equalities),
                     std::move(inequalities), std::move(box), std::move(point));
}

}  // namespace kktcert
