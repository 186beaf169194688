#include "freeze/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "freeze/errors.hpp"

namespace freeze {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Streaming log-sum-exp.
class LogAccumulator {
 public:
  void add(double t) {
    if (t == -kInf) return;
    if (t <= max_) {
      sum_ += std::exp(t - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - t) + 1.0;
      max_ = t;
    }
  }
  double value() const { return max_ == -kInf ? -kInf : max_ + std::log(sum_); }

 private:
  double max_ = -kInf;
  double sum_ = 0.0;
};

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -kInf) return a;
  return a + std::log1p(std::exp(b - a));
}

enum class Weight { Plain, Linear, Prefixed };

void check_inputs(std::span<const double> z, double theta) {
  if (z.empty()) throw std::invalid_argument("series: empty z vector");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("series: theta outside (0,1)");
  for (double v : z)
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("series: z entries must be finite and >= 0");
}

// log of sum_{n>M} w_n x^n with x = e^{-delta}, w_n = 1 or n.
double log_geometric_tail(double delta, std::int64_t M, bool linear) {
  const double d = -std::expm1(-delta);
  const double head = -static_cast<double>(M + 1) * delta;
  if (!linear) return head - std::log(d);
  return head + std::log1p(static_cast<double>(M) * d) - 2.0 * std::log(d);
}

SeriesValue sum_series(double delta, std::span<const double> z, double theta, Weight weight, double S,
                       double tol) {
  check_inputs(z, theta);
  if (!(delta > 0.0)) throw DivergentSeries(fmt::format("series diverges: Z - log p = {} <= 0", delta));
  if (!(tol > 0.0)) throw std::invalid_argument("series: tolerance must be positive");
  if (S > 0.0 || std::isnan(S)) throw std::invalid_argument("series: prefix weight S must be <= 0");

  const double zbar = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
  // Past term M the partial products e^{Lambda_n} move by at most c theta^M in
  // log, and the prefix factors e^{S theta^n} by at most |S| theta^{M+1}.
  const double c = zbar * theta / (1.0 - theta);
  const double spread_scale = c + std::abs(S) * theta;
  std::int64_t M = 1;
  if (spread_scale > 0.0) {
    const double need = std::log(tol / spread_scale) / std::log(theta);
    if (need > static_cast<double>(kMaxSeriesTerms))
      throw TruncationCapExceeded(fmt::format("series needs {:.3g} explicit terms (cap {})", need, kMaxSeriesTerms));
    M = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(need)));
  }

  LogAccumulator acc;
  double lambda = 0.0;
  double tpow = 1.0;
  for (std::int64_t n = 1; n <= M; ++n) {
    tpow *= theta;
    lambda += log_mean_factor(z, tpow);
    double t = -static_cast<double>(n) * delta + lambda;
    if (weight == Weight::Linear) t += std::log(static_cast<double>(n));
    if (weight == Weight::Prefixed) t += S * tpow;
    acc.add(t);
  }
  const double spread = c * tpow + std::abs(S) * tpow * theta;
  const double tail = log_geometric_tail(delta, M, weight == Weight::Linear) + lambda - 0.5 * spread;

  SeriesValue out;
  out.log_value = log_add(acc.value(), tail);
  out.tail_rel_bound = spread;
  out.terms_used = M;
  return out;
}

double excess_of(double Z, std::size_t p) { return Z - std::log(static_cast<double>(p)); }

}  // namespace

double SeriesValue::value() const { return std::exp(log_value); }

double s_factor(std::span<const double> z, double theta, int j) {
  if (z.empty()) throw std::invalid_argument("s_factor: empty z vector");
  const double t = std::pow(theta, j);
  const double zmin = *std::min_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(-(v - zmin) * t);
  return -zmin * t + std::log(s);
}

double log_mean_factor(std::span<const double> z, double t) {
  const double zmin = *std::min_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::expm1(-(v - zmin) * t);
  return -zmin * t + std::log1p(s / static_cast<double>(z.size()));
}

SeriesValue F_excess(double delta, std::span<const double> z, double theta, double tol) {
  return sum_series(delta, z, theta, Weight::Plain, 0.0, tol);
}

SeriesValue F(double Z, std::span<const double> z, double theta, double tol) {
  return F_excess(excess_of(Z, z.size()), z, theta, tol);
}

SeriesValue G_excess(double delta, std::span<const double> z, double theta, double tol) {
  return sum_series(delta, z, theta, Weight::Linear, 0.0, tol);
}

SeriesValue G(double Z, std::span<const double> z, double theta, double tol) {
  return G_excess(excess_of(Z, z.size()), z, theta, tol);
}

SeriesValue F_prefixed_excess(double delta, std::span<const double> z, double theta, double S, double tol) {
  if (S == -kInf) return SeriesValue{-kInf, 0.0, 0};
  return sum_series(delta, z, theta, Weight::Prefixed, S, tol);
}

SeriesValue F_prefixed(double Z, std::span<const double> z, double theta, double S, double tol) {
  return F_prefixed_excess(excess_of(Z, z.size()), z, theta, S, tol);
}

SeriesValue F_truncated_excess(double delta, std::span<const double> z, double theta, std::int64_t K) {
  check_inputs(z, theta);
  if (K < 1) throw std::invalid_argument("F_truncated: K must be >= 1");
  LogAccumulator acc;
  double lambda = 0.0;
  double tpow = 1.0;
  for (std::int64_t n = 1; n <= K; ++n) {
    tpow *= theta;
    lambda += log_mean_factor(z, tpow);
    acc.add(-static_cast<double>(n) * delta + lambda);
  }
  SeriesValue out;
  out.log_value = acc.value();
  out.terms_used = K;
  out.tail_rel_bound = delta > 0.0 ? std::exp(log_geometric_tail(delta, K, false) - out.log_value) : kInf;
  return out;
}

SeriesValue F_truncated(double Z, std::span<const double> z, double theta, std::int64_t K) {
  return F_truncated_excess(excess_of(Z, z.size()), z, theta, K);
}

namespace {

struct SimpsonState {
  double error = 0.0;
  bool failed = false;
};

template <class Fn>
double simpson_step(const Fn& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                    int depth, SimpsonState& st) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (std::abs(diff) <= 15.0 * tol || depth <= 0) {
    if (std::abs(diff) > 15.0 * tol) st.failed = true;
    st.error += std::abs(diff) / 15.0;
    return left + right + diff / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, st) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, st);
}

template <class Fn>
double adaptive_simpson(const Fn& f, double a, double b, double tol, SimpsonState& st) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 48, st);
}

}  // namespace

IntegralValue I_integral(std::span<const double> eta, double tol) {
  if (eta.empty()) throw std::invalid_argument("I_integral: need p >= 2 (at least one gap)");
  if (!(tol > 0.0)) throw std::invalid_argument("I_integral: tolerance must be positive");
  const bool all_zero = std::all_of(eta.begin(), eta.end(), [](double e) { return e == 0.0; });
  if (all_zero) return {0.0, 0.0};
  for (double e : eta)
    if (!(e > 0.0) || !std::isfinite(e))
      throw std::invalid_argument("I_integral: gaps must be all positive or all zero");

  const double p = static_cast<double>(eta.size() + 1);
  const double eta_sum = std::accumulate(eta.begin(), eta.end(), 0.0);
  const double eta_min = *std::min_element(eta.begin(), eta.end());
  double eta_sq = 0.0;
  for (double e : eta) eta_sq += e * e;

  auto near = [&](double x) {
    double s = 0.0;
    for (double e : eta) s += std::expm1(-e * x);
    return std::log1p(s / p) / x;
  };
  auto far = [&](double x) {
    double num = 0.0;
    double den = 1.0;
    for (double e : eta) {
      const double w = std::exp(-e * x);
      num += e * w;
      den += w;
    }
    return num / den * std::log(x);
  };

  const double quarter = 0.25 * tol;
  SimpsonState st;

  // The near integrand extends continuously to -sum(eta)/p at 0 with slope
  // bounded by sum(eta^2)/p + (sum(eta)/p)^2.
  const double x0 = 1e-8;
  double value = -x0 * eta_sum / p;
  double bound = x0 * x0 * (eta_sq / p + (eta_sum / p) * (eta_sum / p));

  value += adaptive_simpson(near, x0, 1.0, quarter, st);

  auto tail_bound = [&](double X) { return eta_sum * std::exp(-eta_min * X) * (std::log(X) + 1.0 / eta_min) / eta_min; };
  double X = 2.0;
  while (tail_bound(X) > quarter) {
    X *= 2.0;
    if (X > 1e12) throw NonConvergence("I_integral: upper cutoff exceeds 1e12");
  }
  // Dyadic pieces keep the adaptive recursion shallow over long ranges.
  const int pieces = static_cast<int>(std::lround(std::log2(X)));
  double a = 1.0;
  for (int k = 0; k < pieces; ++k) {
    const double b = 2.0 * a;
    value += adaptive_simpson(far, a, b, quarter / pieces, st);
    a = b;
  }
  bound += tail_bound(X) + st.error;
  if (st.failed || bound > tol)
    throw NonConvergence(fmt::format("I_integral: tolerance {} unachievable (bound {})", tol, bound));
  return {value, bound};
}

std::vector<double> block_gaps(std::span<const double> slopes) {
  std::vector<double> gaps;
  for (std::size_t i = 1; i < slopes.size(); ++i) gaps.push_back(slopes[i] - slopes[0]);
  return gaps;
}

double r_exponent(int p, double theta) { return -std::log(static_cast<double>(p)) / std::log(theta); }

ProductCheck product_asymptotic_check(std::span<const double> xi, double theta, double beta, int n) {
  if (xi.size() < 2) throw std::invalid_argument("product_asymptotic_check: need p >= 2");
  if (n < 1) throw std::invalid_argument("product_asymptotic_check: n must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("product_asymptotic_check: beta must be positive");
  const int p = static_cast<int>(xi.size());
  std::vector<double> z(xi.begin(), xi.end());
  for (double& v : z) v *= beta;

  ProductCheck out;
  for (int j = 1; j <= n; ++j) out.lhs += s_factor(z, theta, j);

  const auto eta = block_gaps(xi);
  const double I = I_integral(eta, 1e-12).value;
  const double logp = std::log(static_cast<double>(p));
  out.rhs = n * logp - r_exponent(p, theta) * std::log(beta) -
            xi[0] * theta * (-std::expm1(n * std::log(theta))) * beta / (1.0 - theta) - I / std::log(theta);
  out.boundary_constant = 0.5 * logp;
  return out;
}

}  // namespace freeze
