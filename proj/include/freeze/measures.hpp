#pragma once

// Eigenfunction, eigenmeasure and equilibrium measure at a solved pressure.
//
// Normalization: H(u) = 1. Then tau_j = e^P/(1+F_j), H is tau_j/(e^P - p) on
// Sigma_j and e^{-P} tau_j (1 + F(P, theta^n beta alpha[j])) on the ring
// u_{1j}^n *. Large quantities are carried as logarithms.

#include <vector>

#include "freeze/model.hpp"
#include "freeze/pressure.hpp"

namespace freeze {

class EigenData {
 public:
  EigenData(ModelParams params, PressureSolution solution, double series_tol = kDefaultSeriesTol);

  const ModelParams& params() const { return params_; }
  const PressureSolution& solution() const { return sol_; }
  double beta() const { return sol_.beta; }
  double P() const { return sol_.P; }

  double log_tau(int j) const;
  double log_H_sigma(int j) const;
  double log_H_ring(int j, int n) const;  // n >= 1
  double log_H_u() const { return 0.0; }
  // log H at a point; H is constant on Sigma_j, on rings of equal run length
  // in the same block, and on [u].
  double log_H_at(const PointRep& x) const;
  // log(tau_j (1 + F_j)) recomputed from a fresh series evaluation; equals P for every j.
  double log_tau_times_one_plus_F(int j) const;

 private:
  ModelParams params_;
  PressureSolution sol_;
  double series_tol_;
};

struct BlockMeasures {
  std::vector<double> O;           // mass of O_j
  std::vector<double> complement;  // 1 - O[j], computed directly
  double u = 0.0;                  // mass of [u]
  double total() const;
};

BlockMeasures nu_blocks(const ModelParams& params, const PressureSolution& sol);

// nu([m]) for a nonempty single-block word m.
double nu_cylinder(const ModelParams& params, const PressureSolution& sol, const std::vector<Letter>& word,
                   double series_tol = kDefaultSeriesTol);
double log_nu_cylinder(const ModelParams& params, const PressureSolution& sol, const std::vector<Letter>& word,
                       double series_tol = kDefaultSeriesTol);

struct MuBlocks {
  BlockMeasures mass;
  double ratio_12 = 0.0;       // mu(O1)/mu(O2)
  double log_ratio_12 = 0.0;
  double log_normalizer = 0.0;  // log of the unnormalized total
};

MuBlocks mu_blocks(const ModelParams& params, const PressureSolution& sol, double series_tol = kDefaultSeriesTol);

// Normalized mu mass of the ring u_{1j}^{l-1} * extended by any block-j
// letters, i.e. points whose leading run in block j has length exactly l.
// Summing over l >= 1 gives mu(O_j).
double mu_ring_mass(const ModelParams& params, const PressureSolution& sol, const MuBlocks& mu, int j, int l,
                    double series_tol = kDefaultSeriesTol);

struct LimitWeights {
  LimitPrediction prediction;
  double w1 = 1.0;
  double w2 = 0.0;
};

LimitWeights predicted_limit(const ModelParams& params, LimitConvention convention = LimitConvention::Corrected,
                             double tie_tol = 1e-12);

// States compared with the max-plus subaction: Sigma_j for each block, the
// rings u_{1j}^n * for n = 1..n_max, and u.
std::vector<PointRep> tracked_states(const ModelParams& params, int n_max);

// (1/beta) log H at each state, shifted so Sigma_1 maps to 0. beta > 0.
std::vector<double> subaction_from_H(const ModelParams& params, const PressureSolution& sol,
                                     const std::vector<PointRep>& states, double series_tol = kDefaultSeriesTol);

struct MeasureReport {
  double beta = 0.0;
  BlockMeasures nu;
  MuBlocks mu;
  ZoneLabel zone;
  LimitWeights predicted;
};

MeasureReport measure_report(const ModelParams& params, const PressureSolution& sol,
                             LimitConvention convention = LimitConvention::Corrected, double tie_tol = 1e-12);

}  // namespace freeze
