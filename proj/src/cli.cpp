#include "freeze/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "freeze/acceptance.hpp"
#include "freeze/errors.hpp"
#include "freeze/measures.hpp"
#include "freeze/oracle.hpp"
#include "freeze/parallel.hpp"
#include "freeze/pressure.hpp"
#include "freeze/tropical.hpp"

namespace freeze {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string csv_row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += cells[i];
  }
  s += '\n';
  return s;
}

std::string word_name(const std::vector<Letter>& w) {
  std::string s;
  for (const auto& l : w) {
    if (!s.empty()) s += ' ';
    s += fmt::format("{}.{}", l.block + 1, l.index + 1);
  }
  return s;
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions o;
  o.tol = cfg.tol;
  return o;
}

std::vector<std::string> pressure_header() {
  return {"beta", "P", "P_minus_logp", "g", "gamma", "zone", "residual", "terms_used", "source"};
}

// One pressure row. When the root is out of double range the zone's
// asymptotic prediction is emitted instead, marked in the source column.
std::string pressure_row(const RunConfig& cfg, const ZoneLabel& zone, double beta) {
  const auto& m = cfg.model;
  try {
    const auto sol = solve_pressure(m, beta, solver_options(cfg));
    return csv_row({num(beta), num(sol.P), num(sol.excess), num(sol.g()), num(sol.gamma), to_string(zone.zone),
                    num(sol.residual), std::to_string(sol.terms_used), "solved"});
  } catch (const OutOfRange&) {
  } catch (const TruncationCapExceeded&) {
  }
  const auto pred = g_limit_prediction(m, cfg.convention, cfg.tie_tol);
  if (!pred.g_predicted)
    throw NumericalError(fmt::format("beta {}: root out of range and no asymptotic prediction in zone {}", beta,
                                     to_string(zone.zone)));
  const double g = pred.beta_r_g * std::pow(beta, -r_exponent(m.p, m.theta));
  const double excess = g * std::exp(-zone.gamma * beta);
  return csv_row({num(beta), num(std::log(static_cast<double>(m.p)) + excess), num(excess), num(g), num(zone.gamma),
                  to_string(zone.zone), "nan", "0", fmt::format("asymptotic-{}", to_string(cfg.convention))});
}

std::vector<std::string> measures_header(int N) {
  std::vector<std::string> h{"beta"};
  for (int j = 1; j <= N; ++j) h.push_back(fmt::format("nu_O{}", j));
  h.push_back("nu_u");
  for (int j = 1; j <= N; ++j) h.push_back(fmt::format("mu_O{}", j));
  h.insert(h.end(), {"mu_u", "ratio_12", "zone", "predicted_w1", "predicted_w2"});
  return h;
}

std::vector<std::string> measures_cells(double beta, const std::vector<double>& nu_O, double nu_u,
                                        const std::vector<double>& mu_O, double mu_u, double ratio,
                                        const LimitWeights& w) {
  std::vector<std::string> c{num(beta)};
  for (double v : nu_O) c.push_back(num(v));
  c.push_back(num(nu_u));
  for (double v : mu_O) c.push_back(num(v));
  c.push_back(num(mu_u));
  c.push_back(num(ratio));
  c.push_back(to_string(w.prediction.zone.zone));
  c.push_back(num(w.w1));
  c.push_back(num(w.w2));
  return c;
}

void all_words(int block, int p, int depth, std::vector<Letter>& w, std::vector<std::vector<Letter>>& out) {
  if (!w.empty()) out.push_back(w);
  if (static_cast<int>(w.size()) == depth) return;
  for (int i = 0; i < p; ++i) {
    w.push_back(Letter::in_block(block, i));
    all_words(block, p, depth, w, out);
    w.pop_back();
  }
}

std::string cmd_gamma(const RunConfig& cfg) {
  const auto z = zone_classify(cfg.model, cfg.tie_tol);
  const double mcm = max_cycle_mean(build_M(cfg.model));
  std::string s = csv_row({"gamma", "zone", "branches", "max_cycle_mean", "average_branch", "alpha_branch",
                           "theta_branch"});
  s += csv_row({num(z.gamma), to_string(z.zone), z.branches(), num(mcm), num(z.average), num(z.alpha_branch),
                num(z.theta_branch)});
  return s;
}

std::string cmd_zones(const RunConfig& cfg) {
  std::string s = csv_row({"alpha_u", "alpha_p1", "gamma", "zone", "branches"});
  for (double au : cfg.grid_alpha_u->values())
    for (double ap : cfg.grid_alpha_p1->values()) {
      ModelParams m = cfg.model;
      m.alpha_u = au;
      // Moving alpha_{p+1} shifts the whole second block, keeping its gaps.
      const double shift = ap - m.alpha[1][0];
      for (double& a : m.alpha[1]) a += shift;
      m.alpha[1][0] = ap;
      if (!validate(m).empty()) {
        s += csv_row({num(au), num(ap), "nan", "invalid", ""});
        continue;
      }
      const auto z = zone_classify(m, cfg.tie_tol);
      s += csv_row({num(au), num(ap), num(z.gamma), to_string(z.zone), z.branches()});
    }
  return s;
}

std::string cmd_pressure(const RunConfig& cfg) {
  const auto zone = zone_classify(cfg.model, cfg.tie_tol);
  const auto betas = cfg.betas();
  std::vector<std::string> rows(betas.size());
  parallel_for(betas.size(), cfg.threads, [&](std::size_t k) { rows[k] = pressure_row(cfg, zone, betas[k]); });
  std::string s = csv_row(pressure_header());
  for (const auto& r : rows) s += r;
  return s;
}

std::string cmd_measures(const RunConfig& cfg) {
  const auto& m = cfg.model;
  const auto betas = cfg.betas();
  const auto weights = predicted_limit(m, cfg.convention, cfg.tie_tol);
  std::vector<std::string> rows(betas.size());
  std::vector<std::string> cyl(betas.size());
  parallel_for(betas.size(), cfg.threads, [&](std::size_t k) {
    const auto sol = solve_pressure(m, betas[k], solver_options(cfg));
    const auto nu = nu_blocks(m, sol);
    const auto mu = mu_blocks(m, sol);
    rows[k] = csv_row(measures_cells(betas[k], nu.O, nu.u, mu.mass.O, mu.mass.u, mu.ratio_12, weights));
    if (cfg.cylinders > 0) {
      for (int j = 0; j < m.N; ++j) {
        std::vector<Letter> w;
        std::vector<std::vector<Letter>> words;
        all_words(j, m.p, cfg.cylinders, w, words);
        for (const auto& word : words) {
          const double v = nu_cylinder(m, sol, word);
          cyl[k] += csv_row({num(betas[k]), word_name(word), std::to_string(j + 1), std::to_string(word.size()),
                             num(v), num(v * std::pow(static_cast<double>(m.p), word.size()))});
        }
      }
    }
  });
  std::string s = csv_row(measures_header(m.N));
  for (const auto& r : rows) s += r;
  if (cfg.cylinders > 0) {
    s += '\n';
    s += csv_row({"beta", "word", "block", "length", "nu", "nu_times_p_pow_length"});
    for (const auto& c : cyl) s += c;
  }
  return s;
}

std::string cmd_subaction(const RunConfig& cfg) {
  const auto& m = cfg.model;
  const auto states = tracked_states(m, 10);
  const auto V = subaction_eigenvector(m);
  std::vector<double> h;
  if (cfg.beta) h = subaction_from_H(m, solve_pressure(m, *cfg.beta, solver_options(cfg)), states);
  std::string s = cfg.beta ? csv_row({"state", "V", "beta", "log_H_over_beta", "abs_difference"})
                           : csv_row({"state", "V"});
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double v = calibrated_subaction_at(m, V, states[i]);
    if (cfg.beta)
      s += csv_row({to_string(states[i]), num(v), num(*cfg.beta), num(h[i]), num(std::abs(h[i] - v))});
    else
      s += csv_row({to_string(states[i]), num(v)});
  }
  return s;
}

std::string cmd_oracle(const RunConfig& cfg) {
  const auto& m = cfg.model;
  const double beta = *cfg.beta;
  const auto chain = build_chain(m, beta, cfg.depth, cfg.tail);
  const auto triple = leading_triple(chain);
  const auto cm = chain_measures(chain, triple);
  const auto weights = predicted_limit(m, cfg.convention, cfg.tie_tol);
  auto header = measures_header(m.N);
  header.insert(header.end(), {"lambda", "bound"});
  auto cells = measures_cells(beta, cm.nu_O, cm.nu_u, cm.mu_O, cm.mu_u, cm.ratio_12, weights);
  cells.push_back(num(static_cast<double>(triple.lambda)));
  cells.push_back(num(error_bound(m, beta, cfg.depth)));
  return csv_row(header) + csv_row(cells);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw ConfigError(fmt::format("config file '{}' is empty", path));
  return text;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    std::string csv;
    switch (cfg.command) {
      case Command::Gamma:
        csv = cmd_gamma(cfg);
        break;
      case Command::Zones:
        csv = cmd_zones(cfg);
        break;
      case Command::Pressure:
      case Command::Sweep:
        csv = cmd_pressure(cfg);
        break;
      case Command::Measures:
        csv = cmd_measures(cfg);
        break;
      case Command::Subaction:
        csv = cmd_subaction(cfg);
        break;
      case Command::Oracle:
        csv = cmd_oracle(cfg);
        break;
      case Command::Verify: {
        AcceptanceOptions opts;
        opts.convention = cfg.convention;
        opts.tie_tol = cfg.tie_tol;
        opts.threads = cfg.threads;
        std::ostringstream lines;
        std::ostream& dest = cfg.output.empty() ? out : lines;
        const auto results = run_acceptance(dest, opts);
        csv = lines.str();
        bool all = true;
        for (const auto& r : results) all = all && r.pass;
        if (!cfg.output.empty()) {
          std::ofstream f(cfg.output, std::ios::binary);
          if (!f) throw ConfigError(fmt::format("cannot write '{}'", cfg.output));
          f << csv;
        }
        return all ? kExitOk : kExitNumerical;
      }
    }
    if (cfg.output.empty()) {
      out << csv;
    } else {
      std::ofstream f(cfg.output, std::ios::binary);
      if (!f) throw ConfigError(fmt::format("cannot write '{}'", cfg.output));
      f << csv;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-temperature lab for a multi-block potential on the full shift", "freeze_lab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> sets;
  std::string tie_tol, convention, threads, output, tol;
  app.add_option("--config", config_path, "Parameter file (key = value lines)");
  app.add_option("--set", sets, "Override a key: --set alpha_u=0.1 (repeatable)");
  app.add_option("--tie-tol", tie_tol, "Tolerance for ties between gamma branches");
  app.add_option("--convention", convention, "Limit constants: corrected (default) or uncorrected");
  app.add_option("--threads", threads, "Worker threads for sweeps (default FREEZE_LAB_THREADS or all cores)");
  app.add_option("--output", output, "Write CSV to this file instead of standard output");
  app.add_option("--tol", tol, "Pressure solver tolerance on the log-balance residual");

  std::string beta, depth, tail, cylinders;
  std::vector<std::string> grid;
  auto* gamma = app.add_subcommand("gamma", "Max-plus gamma and zone");
  auto* zones = app.add_subcommand("zones", "Zone diagram over (alpha_u, alpha_{p+1})");
  zones->add_option("--grid", grid, "alpha_u=lo:hi:steps alpha_p1=lo:hi:steps")->expected(2);
  auto* pressure = app.add_subcommand("pressure", "Pressure at one beta");
  pressure->add_option("--beta", beta, "Inverse temperature");
  auto* sweep = app.add_subcommand("sweep", "Pressure over a beta range");
  sweep->add_option("--beta", beta, "lo:hi:steps");
  auto* measures = app.add_subcommand("measures", "Eigenmeasure and equilibrium block masses");
  measures->add_option("--beta", beta, "Inverse temperature or lo:hi:steps");
  measures->add_option("--cylinders", cylinders, "Also list nu of all single-block words up to this length");
  auto* subaction = app.add_subcommand("subaction", "Calibrated subaction, optionally against (1/beta) log H");
  subaction->add_option("--beta", beta, "Inverse temperature");
  auto* oracle = app.add_subcommand("oracle", "Finite-state transfer matrix check");
  oracle->add_option("--beta", beta, "Inverse temperature");
  oracle->add_option("--depth", depth, "Run-length truncation L");
  oracle->add_option("--tail", tail, "flat (default) or capped");
  auto* verify = app.add_subcommand("verify", "Acceptance battery");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    Command command = Command::Gamma;
    for (auto [sub, cmd] : {std::pair{gamma, Command::Gamma}, {zones, Command::Zones}, {pressure, Command::Pressure},
                            {sweep, Command::Sweep}, {measures, Command::Measures}, {subaction, Command::Subaction},
                            {oracle, Command::Oracle}, {verify, Command::Verify}})
      if (sub->parsed()) command = cmd;

    KeyValues overrides;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError(fmt::format("--set expects key=value, got '{}'", s));
      auto key = s.substr(0, eq);
      auto value = s.substr(eq + 1);
      const auto trim = [](std::string& t) {
        t.erase(0, t.find_first_not_of(" \t"));
        t.erase(t.find_last_not_of(" \t") + 1);
      };
      trim(key);
      trim(value);
      overrides[key] = value;
    }
    for (const auto& g : grid) {
      const auto eq = g.find('=');
      if (eq == std::string::npos) throw ConfigError(fmt::format("--grid expects name=lo:hi:steps, got '{}'", g));
      const auto name = g.substr(0, eq);
      if (name != "alpha_u" && name != "alpha_p1") throw ConfigError(fmt::format("--grid: unknown axis '{}'", name));
      overrides["grid." + name] = g.substr(eq + 1);
    }
    const std::pair<const char*, const std::string*> flags[] = {
        {"tie_tol", &tie_tol}, {"convention", &convention}, {"threads", &threads}, {"output", &output},
        {"tol", &tol},         {"beta", &beta},             {"depth", &depth},     {"tail", &tail},
        {"cylinders", &cylinders}};
    for (const auto& [key, value] : flags)
      if (!value->empty()) overrides[key] = *value;

    const std::string text = config_path.empty() ? std::string{} : read_file(config_path);
    const auto cfg = parse_config(command, text, overrides);
    return run(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace freeze
