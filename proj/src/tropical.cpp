#include "freeze/tropical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <fmt/format.h>

#include "freeze/errors.hpp"

namespace freeze {

MaxPlusMatrix::MaxPlusMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("MaxPlusMatrix: empty shape");
  if (fill == std::numeric_limits<double>::infinity()) throw std::invalid_argument("MaxPlusMatrix: +inf entry");
}

MaxPlusMatrix MaxPlusMatrix::identity(std::size_t n) {
  MaxPlusMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 0.0;
  return m;
}

MaxPlusMatrix MaxPlusMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw std::invalid_argument("MaxPlusMatrix: empty shape");
  MaxPlusMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw std::invalid_argument("MaxPlusMatrix: ragged rows");
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (rows[i][j] == std::numeric_limits<double>::infinity() || std::isnan(rows[i][j]))
        throw std::invalid_argument("MaxPlusMatrix: entries must be finite or -inf");
      m(i, j) = rows[i][j];
    }
  }
  return m;
}

std::vector<double> MaxPlusMatrix::column(std::size_t j) const {
  std::vector<double> c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

MaxPlusMatrix mp_mul(const MaxPlusMatrix& a, const MaxPlusMatrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument(fmt::format("mp_mul: inner dimensions {} and {} differ", a.cols(), b.rows()));
  MaxPlusMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < b.cols(); ++k) {
      double best = kNegInf;
      for (std::size_t n = 0; n < a.cols(); ++n)
        if (a(i, n) != kNegInf && b(n, k) != kNegInf) best = std::max(best, a(i, n) + b(n, k));
      c(i, k) = best;
    }
  return c;
}

MaxPlusMatrix mp_add(const MaxPlusMatrix& a, const MaxPlusMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("mp_add: shape mismatch");
  MaxPlusMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = std::max(a(i, j), b(i, j));
  return c;
}

MaxPlusMatrix mp_scale(double s, const MaxPlusMatrix& a) {
  MaxPlusMatrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (c(i, j) != kNegInf) c(i, j) += s;
  return c;
}

std::vector<double> mp_apply(const MaxPlusMatrix& a, const std::vector<double>& v) {
  if (a.cols() != v.size()) throw std::invalid_argument("mp_apply: dimension mismatch");
  std::vector<double> out(a.rows(), kNegInf);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != kNegInf && v[j] != kNegInf) out[i] = std::max(out[i], a(i, j) + v[j]);
  return out;
}

double mp_distance(const MaxPlusMatrix& a, const MaxPlusMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("mp_distance: shape mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if ((a(i, j) == kNegInf) != (b(i, j) == kNegInf)) return std::numeric_limits<double>::infinity();
      if (a(i, j) != kNegInf) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    }
  return d;
}

std::string to_string(const MaxPlusMatrix& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s += i ? ", [" : "[";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) s += ", ";
      s += m(i, j) == kNegInf ? std::string("-inf") : fmt::format("{}", m(i, j));
    }
    s += "]";
  }
  return s + "]";
}

namespace {

void require_blocks(const ModelParams& params) {
  if (params.N < 2) throw ConfigError("max-plus matrices need at least 2 blocks");
  require_valid(params);
}

double a_coef(const ModelParams& params, int j) { return params.lead(j) * params.theta / (1.0 - params.theta); }

}  // namespace

MaxPlusMatrix build_M1(const ModelParams& params) {
  require_blocks(params);
  const auto N = static_cast<std::size_t>(params.N);
  MaxPlusMatrix m(N, N + 1);
  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t l = 0; l < N; ++l)
      if (l != j) m(j, l) = -params.lead(static_cast<int>(l)) * params.theta;
    m(j, N) = -params.alpha_u;
  }
  return m;
}

MaxPlusMatrix build_M2(const ModelParams& params) {
  require_blocks(params);
  const auto N = static_cast<std::size_t>(params.N);
  MaxPlusMatrix m(N + 1, N);
  for (std::size_t j = 0; j < N; ++j) {
    const double a = a_coef(params, static_cast<int>(j));
    for (std::size_t i = 0; i <= N; ++i) m(i, j) = i == j ? -a * params.theta : -a;
  }
  return m;
}

MaxPlusMatrix build_M(const ModelParams& params) { return mp_mul(build_M1(params), build_M2(params)); }

MaxPlusMatrix build_M_closed_form(const ModelParams& params) {
  require_blocks(params);
  const auto N = static_cast<std::size_t>(params.N);
  MaxPlusMatrix m(N, N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const double a = a_coef(params, static_cast<int>(j));
      if (i != j) {
        m(i, j) = -a;
      } else {
        const double other = j == 0 ? params.lead(1) : params.lead(0);
        m(i, j) = std::max(-other * params.theta, -params.alpha_u) - a;
      }
    }
  return m;
}

double max_cycle_mean(const MaxPlusMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("max_cycle_mean: matrix not square");
  const std::size_t n = m.rows();
  // Karp with a virtual source joined to every node by a zero arc.
  // D[k][v] = heaviest walk of exactly k arcs ending at v.
  std::vector<std::vector<double>> D(n + 1, std::vector<double>(n, kNegInf));
  std::fill(D[0].begin(), D[0].end(), 0.0);
  for (std::size_t k = 1; k <= n; ++k)
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t u = 0; u < n; ++u)
        if (D[k - 1][u] != kNegInf && m(u, v) != kNegInf) D[k][v] = std::max(D[k][v], D[k - 1][u] + m(u, v));

  double best = kNegInf;
  for (std::size_t v = 0; v < n; ++v) {
    if (D[n][v] == kNegInf) continue;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k)
      if (D[k][v] != kNegInf)
        worst = std::min(worst, (D[n][v] - D[k][v]) / static_cast<double>(n - k));
    best = std::max(best, worst);
  }
  if (best == kNegInf) throw std::invalid_argument("max_cycle_mean: graph has no cycle of finite weight");
  return best;
}

std::vector<std::vector<int>> critical_cycles(const MaxPlusMatrix& m, double gamma, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("critical_cycles: matrix not square");
  const int n = static_cast<int>(m.rows());
  std::vector<std::vector<int>> out;
  std::vector<int> path;
  std::vector<bool> on_path(static_cast<std::size_t>(n), false);

  // Elementary cycles rooted at their smallest node; n is small.
  std::function<void(int, int, double)> extend = [&](int start, int v, double weight) {
    for (int w = start; w < n; ++w) {
      const double e = m(static_cast<std::size_t>(v), static_cast<std::size_t>(w));
      if (e == kNegInf) continue;
      if (w == start) {
        const double mean = (weight + e) / static_cast<double>(path.size());
        if (std::abs(mean + gamma) <= tol * std::max(1.0, std::abs(gamma))) out.push_back(path);
      } else if (!on_path[static_cast<std::size_t>(w)]) {
        on_path[static_cast<std::size_t>(w)] = true;
        path.push_back(w);
        extend(start, w, weight + e);
        path.pop_back();
        on_path[static_cast<std::size_t>(w)] = false;
      }
    }
  };
  for (int s = 0; s < n; ++s) {
    path = {s};
    on_path[static_cast<std::size_t>(s)] = true;
    extend(s, s, 0.0);
    on_path[static_cast<std::size_t>(s)] = false;
  }
  std::sort(out.begin(), out.end());
  return out;
}

double gamma_closed_form(const ModelParams& params) {
  require_blocks(params);
  const double th = params.theta;
  const double a1 = a_coef(params, 0);
  const double avg = (params.lead(0) + params.lead(1)) * th / (2.0 * (1.0 - th));
  return std::min(std::min(params.lead(1) * th, params.alpha_u) + a1, avg);
}

SubactionValues subaction_eigenvector(const ModelParams& params) {
  const auto M1 = build_M1(params);
  const auto M2 = build_M2(params);
  const auto M = mp_mul(M1, M2);
  const std::size_t n = M.rows();
  const double lambda = max_cycle_mean(M);

  const auto Mt = mp_scale(-lambda, M);
  MaxPlusMatrix power = Mt;
  MaxPlusMatrix plus = Mt;
  for (std::size_t k = 2; k <= n; ++k) {
    power = mp_mul(power, Mt);
    plus = mp_add(plus, power);
  }

  const double tol = 1e-12 * std::max(1.0, std::abs(lambda));
  int critical = -1;
  for (std::size_t i = 0; i < n && critical < 0; ++i)
    if (std::abs(plus(i, i)) <= tol) critical = static_cast<int>(i);
  if (critical < 0) throw NumericalError("subaction_eigenvector: no critical node found");

  SubactionValues v;
  v.gamma = -lambda;
  v.critical_node = critical;
  v.V_sigma = plus.column(static_cast<std::size_t>(critical));
  const double shift = v.V_sigma[0];
  for (double& x : v.V_sigma) x -= shift;

  const auto ring = mp_apply(M2, v.V_sigma);
  v.V_ring1.assign(ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(n));
  v.V_u = ring[n];
  return v;
}

double subaction_residual(const ModelParams& params, const SubactionValues& v) {
  const auto M1 = build_M1(params);
  const auto M = mp_mul(M1, build_M2(params));
  double worst = 0.0;
  const auto lhs = mp_apply(M, v.V_sigma);
  for (std::size_t i = 0; i < lhs.size(); ++i) worst = std::max(worst, std::abs(lhs[i] - (v.V_sigma[i] - v.gamma)));
  std::vector<double> ring = v.V_ring1;
  ring.push_back(v.V_u);
  const auto back = mp_apply(M1, ring);
  for (std::size_t i = 0; i < back.size(); ++i)
    worst = std::max(worst, std::abs(back[i] - (v.V_sigma[i] - v.gamma)));
  return worst;
}

double peierls_barrier(const ModelParams& params, int j, const PointRep& x) {
  return -a_coef(params, j) * dist_to_sigma(params, x, j);
}

double calibrated_subaction_at(const ModelParams& params, const SubactionValues& v, const PointRep& x) {
  double best = kNegInf;
  for (int j = 0; j < params.N; ++j) best = std::max(best, v.V_sigma[static_cast<std::size_t>(j)] + peierls_barrier(params, j, x));
  return best;
}

std::string to_string(Zone z) {
  switch (z) {
    case Zone::Z1: return "Z1";
    case Zone::Z2: return "Z2";
    case Zone::Z3only: return "Z3only";
    case Zone::Z4only: return "Z4only";
    case Zone::Z3andZ4: return "Z3andZ4";
  }
  return "?";
}

std::string ZoneLabel::branches() const {
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += '+';
    s += name;
  };
  add(average_active, "average");
  add(alpha_active, "alpha");
  add(theta_active, "theta");
  return s;
}

ZoneLabel zone_classify(const ModelParams& params, double tie_tol) {
  require_blocks(params);
  if (!(tie_tol >= 0.0)) throw ConfigError("tie tolerance must be nonnegative");
  const double th = params.theta;
  const double a1 = a_coef(params, 0);
  ZoneLabel z;
  z.average = (params.lead(0) + params.lead(1)) * th / (2.0 * (1.0 - th));
  z.alpha_branch = params.alpha_u + a1;
  z.theta_branch = params.lead(1) * th + a1;
  z.gamma = std::min({z.average, z.alpha_branch, z.theta_branch});
  z.average_active = z.average - z.gamma <= tie_tol;
  z.alpha_active = z.alpha_branch - z.gamma <= tie_tol;
  z.theta_active = z.theta_branch - z.gamma <= tie_tol;

  if (!z.average_active)
    z.zone = Zone::Z2;
  else if (z.alpha_active && z.theta_active)
    z.zone = Zone::Z3andZ4;
  else if (z.alpha_active)
    z.zone = Zone::Z3only;
  else if (z.theta_active)
    z.zone = Zone::Z4only;
  else
    z.zone = Zone::Z1;
  return z;
}

}  // namespace freeze
