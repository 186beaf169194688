#include "freeze/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "freeze/errors.hpp"
#include "freeze/parallel.hpp"

namespace freeze {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

std::vector<SeriesValue> block_series(const ModelParams& params, double beta, double delta, double tol) {
  std::vector<SeriesValue> out;
  out.reserve(static_cast<std::size_t>(params.N));
  for (int j = 0; j < params.N; ++j) out.push_back(F_excess(delta, params.scaled_block(j, beta), params.theta, tol));
  return out;
}

double log_balance_from(const ModelParams& params, double beta, double delta, const std::vector<SeriesValue>& F) {
  const double logp = std::log(static_cast<double>(params.p));
  double lhs = -logp - delta - params.alpha_u * beta;
  for (int j = 1; j < params.N; ++j) lhs = log_add(lhs, -softplus(-F[static_cast<std::size_t>(j)].log_value));
  return lhs + softplus(F[0].log_value);
}

}  // namespace

double PressureSolution::g() const { return std::exp(log_g); }

double PressureSolution::beta_r_g(const ModelParams& params) const {
  return std::exp(r_exponent(params.p, params.theta) * std::log(beta) + log_g);
}

double residual(const ModelParams& params, double beta, double P, double series_tol) {
  const double delta = P - std::log(static_cast<double>(params.p));
  const auto F = block_series(params, beta, delta, series_tol);
  double s = std::exp(-P - params.alpha_u * beta);
  for (const auto& f : F) s += std::exp(-softplus(-f.log_value));
  return s - 1.0;
}

double log_balance(const ModelParams& params, double beta, double delta, double series_tol) {
  return log_balance_from(params, beta, delta, block_series(params, beta, delta, series_tol));
}

PressureSolution solve_pressure(const ModelParams& params, double beta, const SolverOptions& opts) {
  require_valid(params);
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError(fmt::format("beta must be finite and >= 0 (got {})", beta));
  if (!(opts.tol > 0.0) || !(opts.series_tol > 0.0)) throw ConfigError("solver tolerances must be positive");

  auto phi = [&](double delta) { return log_balance(params, beta, delta, opts.series_tol); };

  // P = log(Np+1) is the root at beta = 0 and an upper bound for beta > 0.
  const double delta_max = std::log(static_cast<double>(params.N) + 1.0 / params.p);
  const double delta_min = 1e-300;
  double lo = delta_min;
  double hi = delta_max;
  int iter = 0;

  double root;
  if (phi(hi) >= 0.0) {
    root = hi;
    lo = hi;
  } else {
    if (phi(lo) <= 0.0)
      throw OutOfRange(fmt::format(
          "beta = {}: pressure excess below {:g}; asymptotic regime beyond double range", beta, delta_min));
    // Geometric bisection until the bracket is within a factor 2, then
    // arithmetic bisection down to adjacent doubles.
    while (hi > lo) {
      if (++iter > opts.max_iter)
        throw NonConvergence(fmt::format("beta = {}: bisection cap reached, bracket [{:.17g}, {:.17g}]", beta, lo, hi));
      const double mid = hi > 2.0 * lo ? std::sqrt(lo) * std::sqrt(hi) : lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      if (phi(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    root = lo + 0.5 * (hi - lo);
  }

  PressureSolution sol;
  sol.beta = beta;
  sol.excess = root;
  sol.log_excess = std::log(root);
  sol.P = std::log(static_cast<double>(params.p)) + root;
  sol.F_blocks = block_series(params, beta, root, opts.series_tol);
  sol.residual = log_balance_from(params, beta, root, sol.F_blocks);
  sol.bracket_lo = lo;
  sol.bracket_hi = hi;
  sol.iterations = iter;
  sol.gamma = gamma_closed_form(params);
  sol.log_g = sol.log_excess + sol.gamma * beta;
  for (const auto& f : sol.F_blocks) sol.terms_used = std::max(sol.terms_used, f.terms_used);
  if (!(std::abs(sol.residual) <= opts.tol))
    throw NonConvergence(fmt::format("beta = {}: residual {:.3g} above tolerance {:.3g}, bracket [{:.17g}, {:.17g}]",
                                     beta, sol.residual, opts.tol, lo, hi));
  return sol;
}

std::vector<PressureSolution> solve_pressure_grid(const ModelParams& params, const std::vector<double>& betas,
                                                  const SolverOptions& opts, int threads) {
  std::vector<PressureSolution> out(betas.size());
  parallel_for(betas.size(), threads, [&](std::size_t i) { out[i] = solve_pressure(params, betas[i], opts); });
  return out;
}

int default_thread_count() {
  if (const char* env = std::getenv("FREEZE_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string to_string(LimitConvention c) { return c == LimitConvention::Corrected ? "corrected" : "uncorrected"; }

LimitConvention parse_convention(const std::string& s) {
  if (s == "corrected") return LimitConvention::Corrected;
  if (s == "uncorrected") return LimitConvention::Uncorrected;
  throw ConfigError(fmt::format("unknown convention '{}' (expected corrected or uncorrected)", s));
}

namespace {

// Root of an increasing function on (0, inf) by bracketing and bisection.
template <class Fn>
double increasing_root(Fn f, double target) {
  double lo = 1.0;
  double hi = 1.0;
  while (f(lo) > target) lo *= 0.5;
  while (f(hi) < target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

LimitPrediction g_limit_prediction(const ModelParams& params, LimitConvention convention, double tie_tol) {
  const double log_theta = std::log(params.theta);
  const double I1 = I_integral(block_gaps(params.alpha[0]), 1e-12).value / log_theta;
  const double I2 = I_integral(block_gaps(params.alpha[1]), 1e-12).value / log_theta;
  auto out = limit_from_constants(zone_classify(params, tie_tol).zone, I1, I2, params.p, convention);
  out.zone = zone_classify(params, tie_tol);
  return out;
}

LimitPrediction limit_from_constants(Zone zone, double I_hat1, double I_hat2, int p_letters,
                                     LimitConvention convention) {
  LimitPrediction out;
  out.zone.zone = zone;
  out.convention = convention;
  out.I_hat1 = I_hat1;
  out.I_hat2 = I_hat2;

  if (out.zone.zone == Zone::Z2) {
    out.g_predicted = false;
    out.rho2 = 0.0;
    out.w1 = 1.0;
    out.w2 = 0.0;
    out.derived_ratio_12 = std::numeric_limits<double>::infinity();
    return out;
  }
  out.g_predicted = true;
  const double p = p_letters;
  const double I1 = out.I_hat1;
  const double I2 = out.I_hat2;

  if (convention == LimitConvention::Corrected) {
    // With X = sqrt(p) lim 1/(beta^r g): e^{-I1-I2} X^2 + k e^{-I1} X / p = 1,
    // k counting the leak branches tied with the average one.
    int k = 0;
    if (out.zone.zone == Zone::Z3only || out.zone.zone == Zone::Z4only) k = 1;
    if (out.zone.zone == Zone::Z3andZ4) k = 2;
    const double a = std::exp(-I1 - I2);
    const double b = k * std::exp(-I1) / p;
    const double X = 2.0 / (b + std::sqrt(b * b + 4.0 * a));
    out.beta_r_g = std::sqrt(p) / X;
    out.rho2 = a * X * X;
    out.derived_ratio_12 = 1.0 / out.rho2;
  } else {
    switch (out.zone.zone) {
      case Zone::Z1:
        out.beta_r_g = std::exp(-0.5 * (I1 + I2)) / p;
        out.rho2 = p * p;
        out.derived_ratio_12 = 1.0 / (p * p);
        break;
      case Zone::Z3only: {
        const double root = std::sqrt(4.0 * p * p * std::exp(I1 - I2) + 1.0) - 1.0;
        out.beta_r_g = 2.0 / (std::exp(I2) * root);
        out.rho2 = 4.0 * std::exp(I1 - I2) / (root * root);
        out.derived_ratio_12 = out.rho2;
        break;
      }
      case Zone::Z4only: {
        const double x = increasing_root(
            [&](double v) { return std::exp(-I1) * v * std::max(1.0, std::exp(-I2) * v); }, p * p);
        out.beta_r_g = 1.0 / x;
        out.rho2 = std::exp(I1 + I2) / (x * x);
        out.derived_ratio_12 = out.rho2;
        break;
      }
      case Zone::Z3andZ4: {
        const double x = increasing_root(
            [&](double v) { return std::exp(-I1) * v * (1.0 + std::max(1.0, std::exp(-I2) * v)); }, p * p);
        out.beta_r_g = 1.0 / x;
        out.rho2 = std::exp(I1 + I2) / (x * x);
        out.derived_ratio_12 = out.rho2;
        break;
      }
      case Zone::Z2:
        break;
    }
  }
  out.w1 = 1.0 / (1.0 + out.rho2);
  out.w2 = out.rho2 / (1.0 + out.rho2);
  return out;
}

}  // namespace freeze
