#include "freeze/measures.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "freeze/errors.hpp"
#include "freeze/series.hpp"

namespace freeze {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

double log_F(const PressureSolution& sol, int j) { return sol.F_blocks.at(static_cast<std::size_t>(j)).log_value; }

// log nu(complement of O_j) = log 1/(1+F_j)
double log_nu_complement(const PressureSolution& sol, int j) { return -softplus(log_F(sol, j)); }

}  // namespace

EigenData::EigenData(ModelParams params, PressureSolution solution, double series_tol)
    : params_(std::move(params)), sol_(std::move(solution)), series_tol_(series_tol) {
  if (static_cast<int>(sol_.F_blocks.size()) != params_.N)
    throw std::invalid_argument("EigenData: solution does not match parameters");
}

double EigenData::log_tau(int j) const { return sol_.P - softplus(log_F(sol_, j)); }

double EigenData::log_H_sigma(int j) const {
  // e^P - p = p (e^delta - 1)
  return log_tau(j) - std::log(static_cast<double>(params_.p)) - std::log(std::expm1(sol_.excess));
}

double EigenData::log_H_ring(int j, int n) const {
  if (n < 1) throw std::invalid_argument("log_H_ring: n must be >= 1");
  auto z = params_.scaled_block(j, sol_.beta);
  const double tn = std::pow(params_.theta, n);
  for (double& v : z) v *= tn;
  const double lf = F_excess(sol_.excess, z, params_.theta, series_tol_).log_value;
  return -sol_.P + log_tau(j) + softplus(lf);
}

double EigenData::log_H_at(const PointRep& x) const {
  const auto lr = leading_run(x);
  if (!lr.has_run) return log_H_u();
  if (lr.run.infinite) return log_H_sigma(lr.run.block);
  return log_H_ring(lr.run.block, static_cast<int>(lr.run.length));
}

double EigenData::log_tau_times_one_plus_F(int j) const {
  const auto fresh = F_excess(sol_.excess, params_.scaled_block(j, sol_.beta), params_.theta, series_tol_);
  return log_tau(j) + softplus(fresh.log_value);
}

double BlockMeasures::total() const {
  double s = u;
  for (double v : O) s += v;
  return s;
}

BlockMeasures nu_blocks(const ModelParams& params, const PressureSolution& sol) {
  BlockMeasures out;
  for (int j = 0; j < params.N; ++j) {
    out.O.push_back(std::exp(-softplus(-log_F(sol, j))));
    out.complement.push_back(std::exp(log_nu_complement(sol, j)));
  }
  out.u = std::exp(-sol.P - params.alpha_u * sol.beta);
  return out;
}

double log_nu_cylinder(const ModelParams& params, const PressureSolution& sol, const std::vector<Letter>& word,
                       double series_tol) {
  const int j = word_block(word);
  const double S = sol.beta * birkhoff_weight(params, word);
  const double n = static_cast<double>(word.size());
  const auto tail = F_prefixed_excess(sol.excess, params.scaled_block(j, sol.beta), params.theta, S, series_tol);
  return -n * sol.P + log_add(S, tail.log_value) + log_nu_complement(sol, j);
}

double nu_cylinder(const ModelParams& params, const PressureSolution& sol, const std::vector<Letter>& word,
                   double series_tol) {
  return std::exp(log_nu_cylinder(params, sol, word, series_tol));
}

MuBlocks mu_blocks(const ModelParams& params, const PressureSolution& sol, double series_tol) {
  std::vector<double> logs;
  for (int j = 0; j < params.N; ++j) {
    const auto G = G_excess(sol.excess, params.scaled_block(j, sol.beta), params.theta, series_tol);
    logs.push_back(G.log_value - 2.0 * softplus(log_F(sol, j)));
  }
  const double log_u = -sol.P - params.alpha_u * sol.beta;
  double norm = log_u;
  for (double l : logs) norm = log_add(norm, l);

  MuBlocks out;
  out.log_normalizer = norm;
  for (double l : logs) out.mass.O.push_back(std::exp(l - norm));
  out.mass.u = std::exp(log_u - norm);
  // 1 - mu(O_j) as the sum of the other masses, which keeps its relative accuracy.
  for (int j = 0; j < params.N; ++j) {
    double rest = log_u;
    for (int l = 0; l < params.N; ++l)
      if (l != j) rest = log_add(rest, logs[static_cast<std::size_t>(l)]);
    out.mass.complement.push_back(std::exp(rest - norm));
  }
  if (params.N >= 2) {
    out.log_ratio_12 = logs[0] - logs[1];
    out.ratio_12 = std::exp(out.log_ratio_12);
  }
  return out;
}

double mu_ring_mass(const ModelParams& params, const PressureSolution& sol, const MuBlocks& mu, int j, int l,
                    double series_tol) {
  if (l < 1) throw std::invalid_argument("mu_ring_mass: l must be >= 1");
  const EigenData eig(params, sol, series_tol);
  const auto z = params.scaled_block(j, sol.beta);
  // nu of all points with leading block-j run of length exactly l:
  // e^{-lP} prod_{i<=l} s_i(z) (1 - nu(O_j)).
  double log_nu = -l * sol.excess + log_nu_complement(sol, j);
  double t = 1.0;
  for (int i = 1; i <= l; ++i) {
    t *= params.theta;
    log_nu += log_mean_factor(z, t);
  }
  return std::exp(eig.log_H_ring(j, l) + log_nu - mu.log_normalizer);
}

LimitWeights predicted_limit(const ModelParams& params, LimitConvention convention, double tie_tol) {
  LimitWeights out;
  out.prediction = g_limit_prediction(params, convention, tie_tol);
  out.w1 = out.prediction.w1;
  out.w2 = out.prediction.w2;
  return out;
}

std::vector<PointRep> tracked_states(const ModelParams& params, int n_max) {
  std::vector<PointRep> states;
  for (int j = 0; j < params.N; ++j) states.push_back(PointRep::in_sigma(j));
  for (int j = 0; j < params.N; ++j)
    for (int n = 1; n <= n_max; ++n) states.push_back(PointRep::first_letter_ring(j, n));
  states.push_back(PointRep::starting_with_u());
  return states;
}

std::vector<double> subaction_from_H(const ModelParams& params, const PressureSolution& sol,
                                     const std::vector<PointRep>& states, double series_tol) {
  if (!(sol.beta > 0.0)) throw std::invalid_argument("subaction_from_H: beta must be positive");
  const EigenData eig(params, sol, series_tol);
  const double ref = eig.log_H_sigma(0);
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& x : states) out.push_back((eig.log_H_at(x) - ref) / sol.beta);
  return out;
}

MeasureReport measure_report(const ModelParams& params, const PressureSolution& sol, LimitConvention convention,
                             double tie_tol) {
  MeasureReport r;
  r.beta = sol.beta;
  r.nu = nu_blocks(params, sol);
  r.mu = mu_blocks(params, sol);
  r.predicted = predicted_limit(params, convention, tie_tol);
  r.zone = r.predicted.prediction.zone;
  return r;
}

}  // namespace freeze
