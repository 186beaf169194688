#pragma once

// Run configuration for the command-line front end.
//
// A config file holds `key = value` lines. Model keys (N, p, theta, alpha_u,
// alpha.<j>.<i>) describe the parameters; option keys (beta, depth, ...) set
// command options. Overrides (from flags) replace file values key by key.
// Without a file the reference parameters are the base.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "freeze/model.hpp"
#include "freeze/oracle.hpp"
#include "freeze/pressure.hpp"

namespace freeze {

enum class Command { Gamma, Zones, Pressure, Sweep, Measures, Subaction, Oracle, Verify };
std::string to_string(Command c);
Command parse_command(const std::string& name);

// lo:hi:steps, steps >= 1 evenly spaced values including both ends.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;

  std::vector<double> values() const;
  static Range parse(const std::string& key, const std::string& text);
};

struct RunConfig {
  ModelParams model;
  Command command = Command::Gamma;
  std::optional<double> beta;
  std::optional<Range> beta_range;
  std::optional<Range> grid_alpha_u;
  std::optional<Range> grid_alpha_p1;
  int depth = 60;
  int cylinders = 0;
  double tol = 1e-12;
  double tie_tol = 1e-12;
  LimitConvention convention = LimitConvention::Corrected;
  TailMode tail = TailMode::Flat;
  int threads = 0;
  std::string output;  // empty: standard output

  // The beta values to evaluate: the single beta or the range.
  std::vector<double> betas() const;
};

bool is_option_key(const std::string& key);

// Throws ConfigError on unknown keys, malformed values, missing model keys
// or options that do not fit the command.
RunConfig parse_config(Command command, std::string_view file_text, const KeyValues& overrides);

}  // namespace freeze
