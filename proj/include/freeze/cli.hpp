#pragma once

// freeze_lab front end: argument parsing and the subcommands.

#include <iosfwd>
#include <string>
#include <vector>

#include "freeze/config.hpp"

namespace freeze {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

// Executes a validated configuration. CSV goes to cfg.output or `out`,
// diagnostics to `err`. `verify` prints one PASS/FAIL line per criterion and
// returns kExitNumerical if any criterion fails.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full command line: parses argv (argv[0] is the program name), loads the
// config file if given, applies flag overrides and runs.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace freeze
