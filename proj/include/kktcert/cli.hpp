#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kktcert/kkt.hpp"

namespace kktcert::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFalsified = 1,
  kUsageError = 2,
  kNumericalFailure = 3,
};

enum class Command { kCheck, kWitness, kCurve, kProbe };
enum class Format { kText, kStructured };

struct RunConfig {
  Command command = Command::kCheck;
  std::string problem_path;
  std::optional<std::string> point;
  kkt::Tolerances tolerances;
  double nu = 1e-3;
  std::vector<double> epsilons{0.0, 1e-5, 1e-4, 1e-3, 1e-2};
  /// 1-based inequality index; unset picks the first active inequality.
  std::optional<std::size_t> j0;
  double radius = 0.05;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  Format format = Format::kText;
};

/// Runs one command. `args` excludes the program name. Reports go to `out`,
/// diagnostics to `err`; every failure maps to an exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a comma-separated list of reals; throws InputError when malformed.
std::vector<double> parse_real_list(const std::string& text);

}  // namespace kktcert::cli
