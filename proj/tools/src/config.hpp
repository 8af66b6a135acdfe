#pragma once

// Run configuration for the mlplab command-line tool.
//
// Grammar: whitespace- or newline-separated `key=value` tokens; `#` starts a
// comment that runs to the end of the line. Values contain no whitespace.
// Unknown and repeated keys are errors.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mlplab/lab.hpp"

namespace mlp::cli {

enum class Command { validate_kernel, compute, norms, verify, sweep, refine };

std::string to_string(Command c);

using KeyValues = std::map<std::string, std::string>;

struct RunConfig {
  Command command = Command::verify;
  std::string kernel = "tensor-odd-gaussian";
  int m = 2;
  int n = 1;
  std::size_t N = 512;
  double L = 8.0;
  double t_min = 0.0;  // 0: grid spacing
  double t_max = 0.0;  // 0: 2L
  std::size_t t_count = 64;
  double lambda = 8.0;
  OperatorKind op = OperatorKind::g;
  GtPath path = GtPath::automatic;
  std::vector<std::string> families;  // TestFamily specs
  std::vector<std::string> inputs;    // grid files
  std::size_t tuples = 20;
  Denominator denominator = Denominator::bmo;
  double p = 2.0;
  std::vector<double> lambdas = {3.0, 5.0, 8.0, 12.0};
  std::vector<std::string> variants = {"N->2N", "L->2L"};
  double threshold = 0.25;
  std::size_t verify_count = 200;
  std::uint64_t seed = 1;
  double vanishing_tol = 1e-6;
  double ratio_tol = 1e-3;
  std::string out;

  /// Every key with its resolved value, in the documented order.
  KeyValues resolved;

  StudyConfig study() const;
  GridSpec grid() const { return {n, N, L}; }
  std::vector<TestFamily> family_specs() const;
};

/// Keys in documentation order.
const std::vector<std::string>& config_keys();

/// Tokenizes `text`. Throws std::invalid_argument on syntax errors, unknown
/// keys or repeated keys.
KeyValues parse_tokens(const std::string& text);

/// Applies defaults and range checks. Throws std::invalid_argument with a
/// message naming the offending key.
RunConfig resolve(const KeyValues& kv);

RunConfig parse_config(const std::string& text);

/// One `key=value` per line, in documentation order; parseable by
/// parse_config.
std::string render(const RunConfig& config);

}  // namespace mlp::cli
