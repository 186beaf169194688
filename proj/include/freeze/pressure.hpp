#pragma once

// Pressure P(beta) = log p + delta(beta) from the scalar equation
//   sum_j F_j/(1+F_j) + e^{-P - alpha_u beta} = 1,  F_j = F(P, beta alpha[j]).
//
// The solver works with the excess delta = P - log p, which is far below the
// resolution of P once beta is moderately large. It brackets the root in
// log delta and balances the two sides
//   sum_{j>=2} F_j/(1+F_j) + e^{-P - alpha_u beta}   and   1/(1+F_1)
// in log form, which is strictly decreasing in delta.

#include <cstdint>
#include <string>
#include <vector>

#include "freeze/model.hpp"
#include "freeze/series.hpp"
#include "freeze/tropical.hpp"

namespace freeze {

struct SolverOptions {
  double tol = 1e-12;  // on the log-balance residual
  double series_tol = kDefaultSeriesTol;
  int max_iter = 400;
};

struct PressureSolution {
  double beta = 0.0;
  double P = 0.0;
  double excess = 0.0;      // P - log p, carried at full relative precision
  double log_excess = 0.0;
  double residual = 0.0;    // log-balance residual at the returned root
  std::vector<SeriesValue> F_blocks;
  double gamma = 0.0;
  double log_g = 0.0;       // log((P - log p) e^{gamma beta})
  double bracket_lo = 0.0;  // final bracket on the excess
  double bracket_hi = 0.0;
  int iterations = 0;
  std::int64_t terms_used = 0;

  double g() const;
  // beta^r g(beta), r = -log p / log theta.
  double beta_r_g(const ModelParams& params) const;
};

// sum_j F_j/(1+F_j) + e^{-P - alpha_u beta} - 1. Requires P > log p. Loses
// all resolution once 1/(1+F_1) drops below double epsilon.
double residual(const ModelParams& params, double beta, double P, double series_tol = kDefaultSeriesTol);

// log(sum_{j>=2} F_j/(1+F_j) + e^{-P-alpha_u beta}) - log(1/(1+F_1)) at P = log p + delta.
double log_balance(const ModelParams& params, double beta, double delta, double series_tol = kDefaultSeriesTol);

// Throws OutOfRange when the root lies below the smallest double excess,
// TruncationCapExceeded when the series need too many terms, and
// NonConvergence on iteration cap.
PressureSolution solve_pressure(const ModelParams& params, double beta, const SolverOptions& opts = {});

// Solutions on a beta grid. Rows are independent; threads <= 0 picks the
// default (FREEZE_LAB_THREADS or hardware concurrency). Failures are
// rethrown after all workers finish.
std::vector<PressureSolution> solve_pressure_grid(const ModelParams& params, const std::vector<double>& betas,
                                                  const SolverOptions& opts = {}, int threads = 0);

// Which set of asymptotic formulas to use for the zero-temperature limits.
//   Corrected: block series asymptotics F ~ sqrt(p) e^{-I_hat} ... including
//     the Euler-Maclaurin boundary constant (log p)/2, with block weights
//     nu(O_j) = F_j/(1+F_j). These match the exact solver.
//   Uncorrected: the leading-order formulas without the boundary constant and
//     with an extra e^{-P} in the block weights (Z3 root taken from its
//     quadratic, i.e. with the +1 under the square root). Kept for comparison.
enum class LimitConvention { Corrected, Uncorrected };
std::string to_string(LimitConvention c);
LimitConvention parse_convention(const std::string& s);

struct LimitPrediction {
  ZoneLabel zone;
  LimitConvention convention = LimitConvention::Corrected;
  bool g_predicted = false;    // false in Z2
  double beta_r_g = 0.0;       // lim beta^r g(beta)
  double rho2 = 0.0;           // weight of the second block relative to the first
  double w1 = 1.0;             // limit weights of mu_top,1 and mu_top,2
  double w2 = 0.0;
  double I_hat1 = 0.0;         // I(eta_j)/log theta for blocks 1 and 2
  double I_hat2 = 0.0;
  // Limit of mu(O1)/mu(O2) implied by the same asymptotics. Under the
  // uncorrected convention this is rho2 itself outside Z1, i.e. the opposite
  // orientation to the weights (1, rho2)/(1+rho2).
  double derived_ratio_12 = 0.0;
};

LimitPrediction g_limit_prediction(const ModelParams& params,
                                   LimitConvention convention = LimitConvention::Corrected,
                                   double tie_tol = 1e-12);
// Same formulas from the zone and the constants I_hat_j = I(eta_j)/log theta.
// Only `zone.zone` of the result's label is filled.
LimitPrediction limit_from_constants(Zone zone, double I_hat1, double I_hat2, int p,
                                     LimitConvention convention);

}  // namespace freeze
