#pragma once

#include "g2roll/expr.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace g2roll {

enum class Format { Text, Json, Csv };

struct RunConfig {
  /// (kappa, c) in {(0,1), (1,1), (2,1), (-1,2)}, alpha = 0.
  std::vector<Params> sweep = default_sweep();
  std::uint64_t seed = 20240611;
  /// Random points for the growth vector and samples for the ODE; the Weyl check uses
  /// min(points, 10).
  std::size_t points = 50;
  std::string out;  // report directory, empty for none
  Format format = Format::Text;
  bool reproducible = false;

  static std::vector<Params> default_sweep();
};

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Parses a sweep file: [{"kappa": "p/q", "c": "p/q", "alpha": "p/q"}, ...]; alpha optional.
std::vector<Params> parse_sweep(std::string_view json_text);

struct CheckResult {
  std::string suite;
  std::string check;
  std::string params;  // "kappa=.. c=.. alpha=.." or "-" for parameter-free checks
  bool pass = false;
  std::string detail;
};

const std::vector<std::string>& suite_names();

/// Runs one suite ("growth", "g2", ...) or "all". Throws ConfigError on an unknown selector.
std::vector<CheckResult> run_verify(std::string_view selector, const RunConfig& cfg);

std::string format_results(const std::vector<CheckResult>& results, Format format, bool reproducible);

}  // namespace g2roll
