#include "freeze/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include <fmt/format.h>

#include "freeze/errors.hpp"

namespace freeze {

namespace {

// Dense LU with partial pivoting: P A = L U, unit lower L stored below the diagonal.
class DenseLU {
 public:
  DenseLU(std::vector<Real> a, std::size_t n) : n_(n), a_(std::move(a)), perm_(n) {
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      Real best = abs(a_[k * n + k]);
      for (std::size_t i = k + 1; i < n; ++i) {
        const Real v = abs(a_[i * n + k]);
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best == 0) throw NumericalError("oracle: singular shifted matrix");
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(a_[k * n + j], a_[piv * n + j]);
        std::swap(perm_[k], perm_[piv]);
      }
      const Real inv = 1 / a_[k * n + k];
      for (std::size_t i = k + 1; i < n; ++i) {
        Real& lik = a_[i * n + k];
        if (lik == 0) continue;
        lik *= inv;
        for (std::size_t j = k + 1; j < n; ++j) a_[i * n + j] -= lik * a_[k * n + j];
      }
    }
  }

  std::vector<Real> solve(const std::vector<Real>& b) const {
    std::vector<Real> x(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      Real s = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= a_[i * n_ + j] * x[j];
      x[i] = s;
    }
    for (std::size_t i = n_; i-- > 0;) {
      Real s = x[i];
      for (std::size_t j = i + 1; j < n_; ++j) s -= a_[i * n_ + j] * x[j];
      x[i] = s / a_[i * n_ + i];
    }
    return x;
  }

  // Solves A^T y = c with A^T = U^T L^T P.
  std::vector<Real> solve_transpose(const std::vector<Real>& c) const {
    std::vector<Real> z(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      Real s = c[i];
      for (std::size_t j = 0; j < i; ++j) s -= a_[j * n_ + i] * z[j];
      z[i] = s / a_[i * n_ + i];
    }
    for (std::size_t i = n_; i-- > 0;) {
      Real s = z[i];
      for (std::size_t j = i + 1; j < n_; ++j) s -= a_[j * n_ + i] * z[j];
      z[i] = s;
    }
    std::vector<Real> y(n_);
    for (std::size_t i = 0; i < n_; ++i) y[perm_[i]] = z[i];
    return y;
  }

 private:
  std::size_t n_;
  std::vector<Real> a_;
  std::vector<std::size_t> perm_;
};

std::vector<Real> apply(const TruncatedChain& c, const std::vector<Real>& v, bool transpose) {
  const std::size_t n = c.size();
  std::vector<Real> out(n, Real(0));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) {
      const Real& w = c.R[s * n + t];
      if (w == 0) continue;
      if (transpose)
        out[t] += w * v[s];
      else
        out[s] += w * v[t];
    }
  return out;
}

struct Bounds {
  Real lo;
  Real hi;
};

// Collatz-Wielandt bounds min/max (Av)_i / v_i for positive v.
Bounds cw_bounds(const std::vector<Real>& v, const std::vector<Real>& Av) {
  Bounds b{Av[0] / v[0], Av[0] / v[0]};
  for (std::size_t i = 1; i < v.size(); ++i) {
    const Real r = Av[i] / v[i];
    if (r < b.lo) b.lo = r;
    if (r > b.hi) b.hi = r;
  }
  return b;
}

void require_positive(const std::vector<Real>& v, const char* what) {
  for (const auto& x : v)
    if (!(x > 0)) throw NumericalError(fmt::format("oracle: {} iterate lost positivity", what));
}

Real max_entry(const std::vector<Real>& v) { return *std::max_element(v.begin(), v.end()); }

std::vector<Real> shifted(const TruncatedChain& c, const Real& mu) {
  std::vector<Real> a(c.R.size());
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = -c.R[i];
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += mu;
  return a;
}

}  // namespace

std::size_t TruncatedChain::after_block_letter(std::size_t s, int j) const {
  return index(j, run_after_block_letter(s, j));
}

int TruncatedChain::run_after_block_letter(std::size_t s, int j) const {
  if (s == u_index()) return 1;
  const int block = static_cast<int>(s / static_cast<std::size_t>(L));
  if (block != j) return 1;
  const int a = static_cast<int>(s % static_cast<std::size_t>(L)) + 1;
  return std::min(a + 1, L);
}

TruncatedChain build_chain(const ModelParams& params, double beta, int L, TailMode mode) {
  require_valid(params);
  if (L < 1) throw ConfigError("oracle depth L must be >= 1");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("oracle beta must be finite and >= 0");
  TruncatedChain c;
  c.N = params.N;
  c.p = params.p;
  c.L = L;
  c.beta = beta;
  c.mode = mode;

  const Real th(params.theta);
  const Real b(beta);
  c.letter_weight.assign(static_cast<std::size_t>(params.N),
                         std::vector<std::vector<Real>>(static_cast<std::size_t>(L) + 1));
  for (int j = 0; j < params.N; ++j)
    for (int a = 1; a <= L; ++a) {
      auto& w = c.letter_weight[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)];
      const bool flat = mode == TailMode::Flat && a == L;
      const Real ta = pow(th, a);
      for (int i = 0; i < params.p; ++i)
        w.push_back(flat ? Real(1) : Real(exp(-b * Real(params.alpha[j][i]) * ta)));
    }
  c.u_weight = exp(-b * Real(params.alpha_u));

  const std::size_t n = c.size();
  c.R.assign(n * n, Real(0));
  for (std::size_t s = 0; s < n; ++s) {
    for (int j = 0; j < params.N; ++j) {
      const int a = c.run_after_block_letter(s, j);
      Real sum = 0;
      for (const auto& w : c.letter_weight[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)]) sum += w;
      c.R[s * n + c.index(j, a)] += sum;
    }
    c.R[s * n + c.u_index()] += c.u_weight;
  }
  return c;
}

double LeadingTriple::log_lambda() const { return static_cast<double>(log(lambda)); }

LeadingTriple leading_triple(const TruncatedChain& chain, double tol, int max_iter) {
  const std::size_t n = chain.size();
  const Real rtol(tol);
  LeadingTriple out;

  std::vector<Real> v(n, Real(1));
  std::vector<Real> Av = apply(chain, v, false);
  Bounds bounds = cw_bounds(v, Av);
  std::unique_ptr<DenseLU> lu;
  int iter = 0;
  while (bounds.hi - bounds.lo > rtol * bounds.hi) {
    if (++iter > max_iter)
      throw NonConvergence(fmt::format("oracle: right eigenvector not converged after {} iterations", max_iter));
    const Real mu = bounds.hi + (bounds.hi - bounds.lo);
    lu = std::make_unique<DenseLU>(shifted(chain, mu), n);
    v = lu->solve(v);
    const Real m = max_entry(v);
    for (auto& x : v) x /= m;
    require_positive(v, "right");
    Av = apply(chain, v, false);
    bounds = cw_bounds(v, Av);
  }
  out.lambda_lo = bounds.lo;
  out.lambda_hi = bounds.hi;
  out.lambda = (bounds.lo + bounds.hi) / 2;
  out.right = v;
  out.right_residual = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Real r = abs(Av[i] - out.lambda * v[i]);
    if (r > out.right_residual) out.right_residual = r;
  }

  // Left vector: inverse iteration on the transpose, reusing the last
  // factorization whose shift already sits just above lambda.
  if (!lu) {
    const Real mu = out.lambda * (1 + Real(1e-30));
    lu = std::make_unique<DenseLU>(shifted(chain, mu), n);
  }
  std::vector<Real> w(n, Real(1));
  std::vector<Real> Aw = apply(chain, w, true);
  Bounds lb = cw_bounds(w, Aw);
  int left_iter = 0;
  while (lb.hi - lb.lo > rtol * lb.hi) {
    if (++left_iter > max_iter)
      throw NonConvergence(fmt::format("oracle: left eigenvector not converged after {} iterations", max_iter));
    w = lu->solve_transpose(w);
    const Real m = max_entry(w);
    for (auto& x : w) x /= m;
    require_positive(w, "left");
    Aw = apply(chain, w, true);
    lb = cw_bounds(w, Aw);
    // A stale shift converges slowly; refresh it from the left bounds.
    if (left_iter % 8 == 0) lu = std::make_unique<DenseLU>(shifted(chain, lb.hi + (lb.hi - lb.lo)), n);
  }
  out.left_residual = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Real r = abs(Aw[i] - out.lambda * w[i]);
    if (r > out.left_residual) out.left_residual = r;
  }
  Real total = 0;
  for (const auto& x : w) total += x;
  for (auto& x : w) x /= total;
  out.left = std::move(w);
  out.iterations = iter + left_iter;
  return out;
}

double error_bound(const ModelParams& params, double beta, int L) {
  return beta * params.alpha_max() * std::pow(params.theta, L);
}

ChainMeasures chain_measures(const TruncatedChain& chain, const LeadingTriple& triple) {
  const std::size_t n = chain.size();
  std::vector<Real> mu(n);
  Real total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mu[i] = triple.left[i] * triple.right[i];
    total += mu[i];
  }
  ChainMeasures out;
  out.log_lambda = triple.log_lambda();
  std::vector<Real> mu_blocks;
  for (int j = 0; j < chain.N; ++j) {
    Real nu_j = 0;
    Real mu_j = 0;
    for (int a = 1; a <= chain.L; ++a) {
      nu_j += triple.left[chain.index(j, a)];
      mu_j += mu[chain.index(j, a)];
    }
    out.nu_O.push_back(static_cast<double>(nu_j));
    out.mu_O.push_back(static_cast<double>(mu_j / total));
    mu_blocks.push_back(mu_j);
  }
  out.nu_u = static_cast<double>(triple.left[chain.u_index()]);
  out.mu_u = static_cast<double>(mu[chain.u_index()] / total);
  if (chain.N >= 2) out.ratio_12 = static_cast<double>(mu_blocks[0] / mu_blocks[1]);
  return out;
}

double chain_cylinder(const TruncatedChain& chain, const LeadingTriple& triple, const std::vector<Letter>& word) {
  if (word.empty()) return 1.0;
  const std::size_t n = chain.size();
  Real total = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (triple.left[s] == 0) continue;
    Real weight = triple.left[s];
    std::size_t state = s;
    for (std::size_t k = word.size(); k-- > 0;) {
      const Letter c = word[k];
      if (c.is_u()) {
        weight *= chain.u_weight;
        state = chain.u_index();
      } else {
        const int a = chain.run_after_block_letter(state, c.block);
        weight *= chain.letter_weight[static_cast<std::size_t>(c.block)][static_cast<std::size_t>(a)]
                                     [static_cast<std::size_t>(c.index)];
        state = chain.index(c.block, a);
      }
    }
    total += weight;
  }
  return static_cast<double>(total / pow(triple.lambda, static_cast<int>(word.size())));
}

}  // namespace freeze
