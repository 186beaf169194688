#include "freeze/config.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "freeze/errors.hpp"

namespace freeze {

namespace {

constexpr std::array<std::pair<Command, const char*>, 8> kCommands{{
    {Command::Gamma, "gamma"},
    {Command::Zones, "zones"},
    {Command::Pressure, "pressure"},
    {Command::Sweep, "sweep"},
    {Command::Measures, "measures"},
    {Command::Subaction, "subaction"},
    {Command::Oracle, "oracle"},
    {Command::Verify, "verify"},
}};

constexpr std::array<const char*, 11> kOptionKeys{"beta",      "depth",     "cylinders", "tol",
                                                  "tie_tol",   "convention", "tail",      "threads",
                                                  "output",    "grid.alpha_u", "grid.alpha_p1"};

}  // namespace

std::string to_string(Command c) {
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c) return name;
  return "?";
}

Command parse_command(const std::string& name) {
  for (const auto& [cmd, n] : kCommands)
    if (name == n) return cmd;
  throw ConfigError(fmt::format("unknown command '{}'", name));
}

std::vector<double> Range::values() const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) {
    v.push_back(lo);
    return v;
  }
  for (int k = 0; k < steps; ++k) v.push_back(k == steps - 1 ? hi : lo + (hi - lo) * k / (steps - 1));
  return v;
}

Range Range::parse(const std::string& key, const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? std::string::npos : text.find(':', a + 1);
  if (b == std::string::npos || text.find(':', b + 1) != std::string::npos)
    throw ConfigError(fmt::format("key '{}': expected lo:hi:steps, got '{}'", key, text));
  Range r;
  r.lo = parse_number(key, text.substr(0, a));
  r.hi = parse_number(key, text.substr(a + 1, b - a - 1));
  r.steps = parse_integer(key, text.substr(b + 1));
  if (r.steps < 1) throw ConfigError(fmt::format("key '{}': steps must be >= 1", key));
  if (r.steps > 1 && !(r.hi > r.lo)) throw ConfigError(fmt::format("key '{}': need hi > lo", key));
  return r;
}

std::vector<double> RunConfig::betas() const {
  if (beta_range) return beta_range->values();
  if (beta) return {*beta};
  return {};
}

bool is_option_key(const std::string& key) {
  for (const char* k : kOptionKeys)
    if (key == k) return true;
  return false;
}

RunConfig parse_config(Command command, std::string_view file_text, const KeyValues& overrides) {
  KeyValues merged;
  const bool have_file = !file_text.empty();
  if (have_file) {
    merged = parse_key_values(file_text);
  } else {
    merged = parse_key_values(format_model_config(example_params()));
  }
  for (const auto& [k, v] : overrides) merged[k] = v;

  KeyValues model_keys;
  for (const auto& [k, v] : merged) {
    if (is_model_key(k))
      model_keys.emplace(k, v);
    else if (!is_option_key(k))
      throw ConfigError(fmt::format("unknown key '{}'", k));
  }

  RunConfig cfg;
  cfg.command = command;
  cfg.model = model_from_entries(model_keys);

  auto get = [&](const char* key) -> const std::string* {
    const auto it = merged.find(key);
    return it == merged.end() ? nullptr : &it->second;
  };

  if (const auto* v = get("beta")) {
    if (v->find(':') != std::string::npos)
      cfg.beta_range = Range::parse("beta", *v);
    else
      cfg.beta = parse_number("beta", *v);
    for (double b : cfg.betas())
      if (b < 0.0) throw ConfigError("key 'beta': must be >= 0");
  }
  if (const auto* v = get("depth")) cfg.depth = parse_integer("depth", *v);
  if (const auto* v = get("cylinders")) cfg.cylinders = parse_integer("cylinders", *v);
  if (const auto* v = get("tol")) cfg.tol = parse_number("tol", *v);
  if (const auto* v = get("tie_tol")) cfg.tie_tol = parse_number("tie_tol", *v);
  if (const auto* v = get("convention")) cfg.convention = parse_convention(*v);
  if (const auto* v = get("tail")) {
    if (*v == "flat")
      cfg.tail = TailMode::Flat;
    else if (*v == "capped")
      cfg.tail = TailMode::Capped;
    else
      throw ConfigError(fmt::format("key 'tail': expected flat or capped, got '{}'", *v));
  }
  if (const auto* v = get("threads")) cfg.threads = parse_integer("threads", *v);
  if (const auto* v = get("output")) cfg.output = *v;
  if (const auto* v = get("grid.alpha_u")) cfg.grid_alpha_u = Range::parse("grid.alpha_u", *v);
  if (const auto* v = get("grid.alpha_p1")) cfg.grid_alpha_p1 = Range::parse("grid.alpha_p1", *v);

  if (!(cfg.tol > 0.0)) throw ConfigError("key 'tol': must be positive");
  if (!(cfg.tie_tol >= 0.0)) throw ConfigError("key 'tie_tol': must be >= 0");
  if (cfg.depth < 1 || cfg.depth > 2000) throw ConfigError("key 'depth': must be in 1..2000");
  if (cfg.cylinders < 0 || cfg.cylinders > 12) throw ConfigError("key 'cylinders': must be in 0..12");
  if (cfg.threads < 0) throw ConfigError("key 'threads': must be >= 0");

  switch (command) {
    case Command::Pressure:
    case Command::Oracle:
      if (!cfg.beta) throw ConfigError(fmt::format("{} needs a single --beta value", to_string(command)));
      break;
    case Command::Sweep:
      if (!cfg.beta_range) throw ConfigError("sweep needs --beta lo:hi:steps");
      break;
    case Command::Measures:
      if (cfg.betas().empty()) throw ConfigError("measures needs --beta");
      break;
    case Command::Subaction:
      if (cfg.beta_range) throw ConfigError("subaction takes a single --beta value");
      if (cfg.beta && !(*cfg.beta > 0.0)) throw ConfigError("subaction needs beta > 0");
      break;
    case Command::Zones:
      if (!cfg.grid_alpha_u || !cfg.grid_alpha_p1)
        throw ConfigError("zones needs --grid alpha_u=lo:hi:steps alpha_p1=lo:hi:steps");
      break;
    case Command::Gamma:
    case Command::Verify:
      break;
  }
  return cfg;
}

}  // namespace freeze
