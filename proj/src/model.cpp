#include "freeze/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "freeze/errors.hpp"

namespace freeze {

double ModelParams::alpha_max() const {
  double m = alpha_u;
  for (const auto& row : alpha)
    for (double a : row) m = std::max(m, a);
  return m;
}

std::vector<double> ModelParams::scaled_block(int j, double beta) const {
  std::vector<double> z(alpha[j]);
  for (double& v : z) v *= beta;
  return z;
}

ModelParams example_params() {
  return ModelParams{2, 2, 0.5, {{1.0, 2.0}, {1.5, 3.0}}, 0.3};
}

std::vector<std::string> validate(const ModelParams& params) {
  std::vector<std::string> errors;
  if (params.N < 2) errors.push_back(fmt::format("N must be at least 2 (got {})", params.N));
  if (params.p < 2) errors.push_back(fmt::format("p must be at least 2 (got {})", params.p));
  if (!(params.theta > 0.0 && params.theta < 1.0))
    errors.push_back(fmt::format("theta outside (0,1) (got {})", params.theta));
  if (!(params.alpha_u > 0.0) || !std::isfinite(params.alpha_u))
    errors.push_back("alpha_u must be positive");

  if (params.N < 1 || params.p < 1) return errors;
  if (static_cast<int>(params.alpha.size()) != params.N) {
    errors.push_back(fmt::format("alpha has {} blocks, expected N = {}", params.alpha.size(), params.N));
    return errors;
  }
  bool shape_ok = true;
  for (int j = 0; j < params.N; ++j) {
    if (static_cast<int>(params.alpha[j].size()) != params.p) {
      errors.push_back(fmt::format("block {} has {} slopes, expected p = {}", j + 1,
                                   params.alpha[j].size(), params.p));
      shape_ok = false;
    }
  }
  if (!shape_ok) return errors;

  for (int j = 0; j < params.N; ++j)
    for (int i = 0; i < params.p; ++i)
      if (!(params.alpha[j][i] > 0.0) || !std::isfinite(params.alpha[j][i]))
        errors.push_back(fmt::format("alpha.{}.{} must be positive", j + 1, i + 1));

  for (int j = 0; j < params.N; ++j) {
    const auto& row = params.alpha[j];
    if (params.p >= 2 && !(row[0] < row[1]))
      errors.push_back(fmt::format("first gap not strict in block {}", j + 1));
    for (int i = 2; i < params.p; ++i)
      if (row[i] < row[i - 1])
        errors.push_back(fmt::format("slopes not nondecreasing in block {} at letter {}", j + 1, i + 1));
  }

  // alpha_1 < alpha_{p+1} < alpha_{2p+1} <= ... <= alpha_{(N-1)p+1}
  for (int j = 1; j < params.N; ++j) {
    const bool strict = j <= 2;
    const double prev = params.alpha[j - 1][0];
    const double cur = params.alpha[j][0];
    if (strict ? !(prev < cur) : (cur < prev))
      errors.push_back(fmt::format("leading slopes out of order between blocks {} and {}{}", j, j + 1,
                                   strict ? " (strict)" : ""));
  }
  return errors;
}

void require_valid(const ModelParams& params) {
  auto errors = validate(params);
  if (errors.empty()) return;
  std::string msg = "invalid parameters:";
  for (const auto& e : errors) msg += " " + e + ";";
  msg.pop_back();
  throw ConfigError(msg, std::move(errors));
}

double letter_alpha(const ModelParams& params, Letter letter) {
  if (letter.is_u()) return params.alpha_u;
  return params.alpha.at(letter.block).at(letter.index);
}

PointRep PointRep::first_letter_ring(int j, int n) {
  return ring(std::vector<Letter>(static_cast<std::size_t>(n), Letter::in_block(j, 0)));
}

std::string to_string(const PointRep& x) {
  std::string s;
  for (const auto& l : x.prefix) {
    if (l.is_u())
      s += "u ";
    else
      s += fmt::format("({},{}) ", l.block + 1, l.index + 1);
  }
  if (const auto* t = std::get_if<InSigma>(&x.tail))
    s += fmt::format("| Sigma_{}", t->block + 1);
  else
    s += "| *";
  return s;
}

LeadingRun leading_run(const PointRep& x) {
  if (x.prefix.empty()) {
    if (const auto* t = std::get_if<InSigma>(&x.tail)) return {true, {t->block, true, 0}};
    throw std::invalid_argument("leading_run: empty point");
  }
  const Letter first = x.prefix.front();
  if (first.is_u()) return {};
  const int b = first.block;
  std::size_t a = 0;
  while (a < x.prefix.size() && x.prefix[a].block == b) ++a;
  if (a == x.prefix.size()) {
    if (const auto* t = std::get_if<InSigma>(&x.tail); t && t->block == b) return {true, {b, true, 0}};
  }
  return {true, {b, false, a}};
}

double dist_to_sigma(const ModelParams& params, const PointRep& x, int j) {
  const auto lr = leading_run(x);
  if (!lr.has_run || lr.run.block != j) return 1.0;
  if (lr.run.infinite) return 0.0;
  return std::pow(params.theta, static_cast<double>(lr.run.length));
}

double potential_A(const ModelParams& params, const PointRep& x) {
  const auto lr = leading_run(x);
  if (!lr.has_run) return -params.alpha_u;
  if (lr.run.infinite) return 0.0;
  const double d = std::pow(params.theta, static_cast<double>(lr.run.length));
  return -letter_alpha(params, x.prefix.front()) * d;
}

int word_block(const std::vector<Letter>& word) {
  if (word.empty()) throw std::invalid_argument("empty word");
  const int b = word.front().block;
  for (const auto& l : word)
    if (l.is_u() || l.block != b) throw std::invalid_argument("word is not admissible for a single block");
  return b;
}

double birkhoff_weight(const ModelParams& params, const std::vector<Letter>& word) {
  word_block(word);
  const std::size_t n = word.size();
  double s = 0.0;
  for (std::size_t l = 0; l < n; ++l)
    s -= letter_alpha(params, word[l]) * std::pow(params.theta, static_cast<double>(n - l));
  return s;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(fmt::format("line {}: expected 'key = value', got '{}'", line_no, stripped));
    std::string key = trim(std::string_view(stripped).substr(0, eq));
    std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", line_no));
    if (out.count(key)) throw ConfigError(fmt::format("duplicate key '{}'", key));
    out.emplace(std::move(key), std::move(value));
  }
  return out;
}

double parse_number(const std::string& key, const std::string& value) {
  double v = 0.0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || value.empty() || !std::isfinite(v))
    throw ConfigError(fmt::format("key '{}': malformed number '{}'", key, value));
  return v;
}

int parse_integer(const std::string& key, const std::string& value) {
  int v = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || value.empty())
    throw ConfigError(fmt::format("key '{}': malformed integer '{}'", key, value));
  return v;
}

bool is_model_key(const std::string& key) {
  return key == "N" || key == "p" || key == "theta" || key == "alpha_u" || key.rfind("alpha.", 0) == 0;
}

ModelParams model_from_entries(const KeyValues& entries) {
  for (const auto& [key, value] : entries)
    if (!is_model_key(key)) throw ConfigError(fmt::format("unknown key '{}'", key));
  auto need = [&](const std::string& key) -> const std::string& {
    const auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError(fmt::format("missing required key '{}'", key));
    return it->second;
  };
  ModelParams params;
  params.N = parse_integer("N", need("N"));
  params.p = parse_integer("p", need("p"));
  params.theta = parse_number("theta", need("theta"));
  params.alpha_u = parse_number("alpha_u", need("alpha_u"));
  if (params.N < 1 || params.p < 1 || params.N > 1000 || params.p > 1000)
    throw ConfigError(fmt::format("key 'N'/'p': sizes out of range (N = {}, p = {})", params.N, params.p));
  params.alpha.assign(params.N, std::vector<double>(params.p, 0.0));
  for (const auto& [key, value] : entries) {
    if (key.rfind("alpha.", 0) != 0) continue;
    const auto rest = key.substr(6);
    const auto dot = rest.find('.');
    if (dot == std::string::npos) throw ConfigError(fmt::format("unknown key '{}'", key));
    int j = 0;
    int i = 0;
    try {
      j = parse_integer(key, rest.substr(0, dot));
      i = parse_integer(key, rest.substr(dot + 1));
    } catch (const ConfigError&) {
      throw ConfigError(fmt::format("unknown key '{}'", key));
    }
    if (j < 1 || j > params.N || i < 1 || i > params.p)
      throw ConfigError(fmt::format("key '{}': index outside N = {}, p = {}", key, params.N, params.p));
    params.alpha[j - 1][i - 1] = parse_number(key, value);
  }
  for (int j = 0; j < params.N; ++j)
    for (int i = 0; i < params.p; ++i) need(fmt::format("alpha.{}.{}", j + 1, i + 1));
  require_valid(params);
  return params;
}

ModelParams parse_model_config(std::string_view text) {
  return model_from_entries(parse_key_values(text));
}

std::string format_model_config(const ModelParams& params) {
  std::string out;
  out += fmt::format("N = {}\np = {}\ntheta = {}\nalpha_u = {}\n", params.N, params.p, params.theta,
                     params.alpha_u);
  for (int j = 0; j < params.N; ++j)
    for (int i = 0; i < params.p; ++i)
      out += fmt::format("alpha.{}.{} = {}\n", j + 1, i + 1, params.alpha[j][i]);
  return out;
}

}  // namespace freeze
