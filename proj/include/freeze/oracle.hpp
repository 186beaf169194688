#pragma once

// Finite-state check of the pressure and the measures.
//
// The potential depends on a point only through its first letter and the
// length of its leading block run. Truncating the run length at L gives an
// exact (N L + 1)-state transfer matrix: states (j, a), a = 1..L, for a point
// whose leading run is in block j with length a (a = L meaning "at least L"),
// plus U for points starting with u. R(s, t) sums the weights e^{beta A_L(cx)}
// over letters c taking a point in state s to state t.
//
// The Perron root p e^{delta} sits just above eigenvalues close to p, so the
// spectral gap is about p delta and drops below double resolution already at
// moderate beta. Everything here runs in 50-digit binary floating
// point, and the eigenvectors come from shifted inverse iteration whose shift
// is the Collatz-Wielandt upper bound.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <vector>

#include "freeze/model.hpp"

namespace freeze {

using Real = boost::multiprecision::cpp_bin_float_50;

// How the potential is truncated beyond run length L.
//   Flat:   A_L = 0 once the run reaches L, so runs >= L behave like Sigma_j.
//   Capped: A_L uses theta^{min(run, L)}.
// Both satisfy sup |A_L - A| <= alpha_max theta^L. Flat keeps the residual
// mass of block j at the right order: with Capped every letter in the long
// run pays beta alpha theta^L, which shifts the nearly-critical eigenvalue by
// far more than the gap once beta alpha theta^L exceeds delta.
enum class TailMode { Flat, Capped };

struct TruncatedChain {
  int N = 0;
  int p = 0;
  int L = 0;
  double beta = 0.0;
  TailMode mode = TailMode::Flat;
  // letter_weight[j][a][i]: weight of block-j letter i producing run length a
  // (a = 1..L, index 0 unused).
  std::vector<std::vector<std::vector<Real>>> letter_weight;
  Real u_weight;
  std::vector<Real> R;  // row-major size() x size()

  std::size_t size() const { return static_cast<std::size_t>(N) * L + 1; }
  std::size_t index(int j, int a) const { return static_cast<std::size_t>(j) * L + (a - 1); }
  std::size_t u_index() const { return static_cast<std::size_t>(N) * L; }
  const Real& at(std::size_t s, std::size_t t) const { return R[s * size() + t]; }
  // State reached by prepending a block-j letter to a point in state s.
  std::size_t after_block_letter(std::size_t s, int j) const;
  int run_after_block_letter(std::size_t s, int j) const;
};

TruncatedChain build_chain(const ModelParams& params, double beta, int L, TailMode mode = TailMode::Flat);

struct LeadingTriple {
  Real lambda;
  Real lambda_lo;  // Collatz-Wielandt bracket for the right vector
  Real lambda_hi;
  std::vector<Real> right;  // max entry 1
  std::vector<Real> left;   // sums to 1
  Real right_residual;      // ||R v - lambda v||_inf
  Real left_residual;       // ||R^T w - lambda w||_inf / ||w||_inf
  int iterations = 0;

  double log_lambda() const;
};

LeadingTriple leading_triple(const TruncatedChain& chain, double tol = 1e-30, int max_iter = 200);

double error_bound(const ModelParams& params, double beta, int L);

struct ChainMeasures {
  std::vector<double> nu_O;
  std::vector<double> mu_O;
  double nu_u = 0.0;
  double mu_u = 0.0;
  double log_lambda = 0.0;
  double ratio_12 = 0.0;
};

ChainMeasures chain_measures(const TruncatedChain& chain, const LeadingTriple& triple);

// nu_L([m]) for any finite word.
double chain_cylinder(const TruncatedChain& chain, const LeadingTriple& triple, const std::vector<Letter>& word);

}  // namespace freeze
