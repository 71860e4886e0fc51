#pragma once

#include "buridan/model.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace buridan {

/// Diagnostic tied to a config line (0 when the problem has no single line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct RunConfig {
  ModelParams params;
  std::string engine = "master";   ///< master | fp
  std::string memory = "short";    ///< short | full
  std::string init = "paramagnet"; ///< paramagnet | gaussian
  std::string model = "gaussian-cubic";
  std::vector<double> times;       ///< output times in units of theta
  std::vector<double> times_abs;   ///< output times in absolute units (wins if set)
  double t_end = 5.0;              ///< in units of theta
  double tol = 1e-9;
  int cells = 2000;
  std::uint64_t seed = 1;
  std::size_t trajectories = 100000;
  std::string out_dir;
  double lambda_threshold = 3.0;
  double p_wrong_bound = 1e-3;
  double purity_limit = 1.0;
  double coupling_limit = 1.0;
  double g_spread = 0.1;
  double r_up = 1.0;
  double offdiag = 0.0;
  unsigned threads = 0;
  std::string sweep_key;
  std::vector<double> sweep_values;

  std::map<std::string, int> lines;  ///< key -> line it was set on

  /// Line of `key`, or 0.
  int line_of(const std::string& key) const;
};

/// Parses `key = value` lines with `#` comments. Requires N, T and g; validates
/// the model parameters. Throws ConfigError with the offending line.
RunConfig parse_config(std::string_view text);

/// Sets one key as if it appeared on `line` (used by --set and sweeps).
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, int line = 0);

/// Re-validates after overrides.
void validate_config(const RunConfig& cfg);

/// ConfigError at the T line unless T < J.
void require_ferromagnetic(const RunConfig& cfg);

/// Comma-separated list of numbers.
std::vector<double> parse_number_list(std::string_view text);

std::vector<std::string> config_keys();

}  // namespace buridan
