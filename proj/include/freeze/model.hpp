#pragma once

// Alphabet, parameters, metric and potential.
//
// The alphabet has N*p + 1 letters: N blocks of p letters each and the extra
// letter u. Blocks and letters are 0-based in this API; text formats (config
// keys, CSV headers) use 1-based labels.

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace freeze {

struct ModelParams {
  int N = 0;
  int p = 0;
  double theta = 0.0;
  std::vector<std::vector<double>> alpha;  // alpha[j][i], N rows of p slopes
  double alpha_u = 0.0;

  // Slope of the first letter of block j.
  double lead(int j) const { return alpha[j][0]; }
  double alpha_max() const;
  // Block j's slopes scaled by beta, the z-vector fed to the series.
  std::vector<double> scaled_block(int j, double beta) const;
};

// The reference parameter set used throughout the tests and README.
ModelParams example_params();

// Every violated constraint, in a stable order. Empty means valid.
std::vector<std::string> validate(const ModelParams& params);
// Throws ConfigError listing all violations.
void require_valid(const ModelParams& params);

struct Letter {
  static constexpr int kU = -1;
  int block = kU;
  int index = 0;

  static constexpr Letter u() { return Letter{}; }
  static constexpr Letter in_block(int j, int i) { return Letter{j, i}; }
  constexpr bool is_u() const { return block == kU; }
  auto operator<=>(const Letter&) const = default;
};

double letter_alpha(const ModelParams& params, Letter letter);

// After the prefix the point stays in block j forever.
struct InSigma {
  int block = 0;
  auto operator<=>(const InSigma&) const = default;
};
// The letter after the prefix leaves the prefix's leading block.
struct Star {
  auto operator<=>(const Star&) const = default;
};
using Tail = std::variant<InSigma, Star>;

struct PointRep {
  std::vector<Letter> prefix;
  Tail tail = Star{};

  static PointRep ring(std::vector<Letter> word) { return {std::move(word), Star{}}; }
  static PointRep in_sigma(int j, std::vector<Letter> prefix = {}) {
    return {std::move(prefix), InSigma{j}};
  }
  static PointRep starting_with_u() { return {{Letter::u()}, Star{}}; }
  // The ring representative u_{1j}^n * : n copies of block j's first letter.
  static PointRep first_letter_ring(int j, int n);

  bool operator==(const PointRep&) const = default;
};

std::string to_string(const PointRep& x);

struct Run {
  int block = 0;
  bool infinite = false;
  std::size_t length = 0;  // meaningful when !infinite
};

// Leading block run of x; nullopt-like (has_run=false) when x starts with u.
struct LeadingRun {
  bool has_run = false;
  Run run;
};
LeadingRun leading_run(const PointRep& x);

double dist_to_sigma(const ModelParams& params, const PointRep& x, int j);
double potential_A(const ModelParams& params, const PointRep& x);

// S(m) = -sum_l alpha_{m_l} theta^(n-l) for a single-block word m.
double birkhoff_weight(const ModelParams& params, const std::vector<Letter>& word);
// Block of a nonempty single-block word; throws std::invalid_argument otherwise.
int word_block(const std::vector<Letter>& word);

using KeyValues = std::map<std::string, std::string>;

// Lines of the form `key = value`; '#' starts a comment. Duplicate keys and
// lines without '=' raise ConfigError.
KeyValues parse_key_values(std::string_view text);
double parse_number(const std::string& key, const std::string& value);
int parse_integer(const std::string& key, const std::string& value);

// Model keys: N, p, theta, alpha_u, alpha.<j>.<i> (1-based). Unknown keys,
// malformed numbers and missing entries raise ConfigError naming the key.
// The result is validated.
ModelParams model_from_entries(const KeyValues& entries);
bool is_model_key(const std::string& key);
ModelParams parse_model_config(std::string_view text);
std::string format_model_config(const ModelParams& params);

}  // namespace freeze
