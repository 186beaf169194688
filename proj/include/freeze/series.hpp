#pragma once

// Auxiliary series
//   F(Z, z)   = sum_{n>=1} e^{-nZ} prod_{j=1..n} s_j(z)
//   G(Z, z)   = sum_{n>=1} n e^{-nZ} prod_{j=1..n} s_j(z)
//   F_S(Z, z) = sum_{n>=1} e^{S theta^n} e^{-nZ} prod_{j=1..n} s_j(z)
// with s_j(z) = sum_i exp(-z_i theta^j), and the singular integral I(eta).
//
// All three series converge iff Z > log p. Near the zero-temperature regime
// the excess Z - log p falls far below the resolution of Z itself, so every
// entry point has an `_excess` variant taking delta = Z - log p directly.
// Values are returned as logarithms.

#include <cstdint>
#include <span>
#include <vector>

namespace freeze {

struct SeriesValue {
  double log_value = 0.0;
  double tail_rel_bound = 0.0;  // certified relative error of the tail treatment
  std::int64_t terms_used = 0;

  double value() const;
};

struct IntegralValue {
  double value = 0.0;
  double abs_error_bound = 0.0;
};

inline constexpr double kDefaultSeriesTol = 1e-14;
inline constexpr std::int64_t kMaxSeriesTerms = 100'000'000;

// log sum_i exp(-z_i theta^j).
double s_factor(std::span<const double> z, double theta, int j);
// log mean_i exp(-z_i t), i.e. s_factor - log p at t = theta^j; accurate when
// t z is tiny.
double log_mean_factor(std::span<const double> z, double t);

SeriesValue F(double Z, std::span<const double> z, double theta, double tol = kDefaultSeriesTol);
SeriesValue F_excess(double delta, std::span<const double> z, double theta,
                     double tol = kDefaultSeriesTol);

SeriesValue G(double Z, std::span<const double> z, double theta, double tol = kDefaultSeriesTol);
SeriesValue G_excess(double delta, std::span<const double> z, double theta,
                     double tol = kDefaultSeriesTol);

// S <= 0. The n = 0 term e^S is left to the caller.
SeriesValue F_prefixed(double Z, std::span<const double> z, double theta, double S,
                       double tol = kDefaultSeriesTol);
SeriesValue F_prefixed_excess(double delta, std::span<const double> z, double theta, double S,
                              double tol = kDefaultSeriesTol);

// Partial sum n = 1..K, no convergence requirement. tail_rel_bound is the
// geometric bound (p e^{-Z})^{K+1} / (1 - p e^{-Z}) relative to the partial
// sum when Z > log p, and +inf otherwise.
SeriesValue F_truncated(double Z, std::span<const double> z, double theta, std::int64_t K);
SeriesValue F_truncated_excess(double delta, std::span<const double> z, double theta, std::int64_t K);

// I(eta) = int_0^1 log(1 + sum_i (e^{-eta_i x} - 1)/p) dx/x
//        + int_1^inf (sum_i eta_i e^{-eta_i x}) / (1 + sum_i e^{-eta_i x}) log x dx
// with p = eta.size() + 1. eta must be all positive, or all zero (then I = 0).
IntegralValue I_integral(std::span<const double> eta, double tol = 1e-12);

// Gaps eta_i = alpha[j][i] - alpha[j][0], i >= 1, of one block's slopes.
std::vector<double> block_gaps(std::span<const double> slopes);

double r_exponent(int p, double theta);

struct ProductCheck {
  double lhs = 0.0;  // log prod_{j=1..n} sum_i exp(-xi_i theta^j beta)
  double rhs = 0.0;  // n log p - r log beta - xi_1 theta (1-theta^n) beta/(1-theta) - I/log theta
  // Euler-Maclaurin boundary constant (log p)/2 missing from rhs; lhs - rhs
  // tends to it up to a small log-periodic oscillation in log beta.
  double boundary_constant = 0.0;
};
ProductCheck product_asymptotic_check(std::span<const double> xi, double theta, double beta, int n);

}  // namespace freeze
