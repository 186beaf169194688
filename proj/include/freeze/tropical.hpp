#pragma once

// Max-plus spectral data: M1, M2, M = M1 (x) M2, the maximal cycle mean -gamma,
// the calibrated subaction and the parameter zones.

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "freeze/model.hpp"

namespace freeze {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class MaxPlusMatrix {
 public:
  MaxPlusMatrix() = default;
  MaxPlusMatrix(std::size_t rows, std::size_t cols, double fill = kNegInf);
  static MaxPlusMatrix identity(std::size_t n);
  static MaxPlusMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::vector<double> column(std::size_t j) const;

  bool operator==(const MaxPlusMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

MaxPlusMatrix mp_mul(const MaxPlusMatrix& a, const MaxPlusMatrix& b);
MaxPlusMatrix mp_add(const MaxPlusMatrix& a, const MaxPlusMatrix& b);
MaxPlusMatrix mp_scale(double c, const MaxPlusMatrix& a);
std::vector<double> mp_apply(const MaxPlusMatrix& a, const std::vector<double>& v);
// Largest entrywise difference; -inf entries must match.
double mp_distance(const MaxPlusMatrix& a, const MaxPlusMatrix& b);
std::string to_string(const MaxPlusMatrix& m);

// N x (N+1): row j holds -alpha_{l,1} theta in column l != j, -inf on the
// diagonal, -alpha_u last.
MaxPlusMatrix build_M1(const ModelParams& params);
// (N+1) x N: column j holds -a_j theta on the diagonal and -a_j elsewhere,
// with a_j = alpha_{j,1} theta/(1-theta).
MaxPlusMatrix build_M2(const ModelParams& params);
// The authoritative M.
MaxPlusMatrix build_M(const ModelParams& params);
// Entry formula for M as displayed in closed form.
MaxPlusMatrix build_M_closed_form(const ModelParams& params);

double max_cycle_mean(const MaxPlusMatrix& m);

// Elementary cycles whose mean is within tol of the maximal one, each listed
// from its smallest node, in lexicographic order.
std::vector<std::vector<int>> critical_cycles(const MaxPlusMatrix& m, double gamma, double tol = 1e-12);

double gamma_closed_form(const ModelParams& params);

struct SubactionValues {
  std::vector<double> V_sigma;  // V on Sigma_j, V_sigma[0] = 0
  std::vector<double> V_ring1;  // V(u_{1j} *)
  double V_u = 0.0;
  double gamma = 0.0;
  int critical_node = 0;
};

SubactionValues subaction_eigenvector(const ModelParams& params);
// Largest violation of M (x) V_sigma = (-gamma) (x) V_sigma and of
// V_sigma - gamma = M1 (x) (V_ring1, V_u).
double subaction_residual(const ModelParams& params, const SubactionValues& v);

double peierls_barrier(const ModelParams& params, int j, const PointRep& x);
double calibrated_subaction_at(const ModelParams& params, const SubactionValues& v, const PointRep& x);

enum class Zone { Z1, Z2, Z3only, Z4only, Z3andZ4 };
std::string to_string(Zone z);

struct ZoneLabel {
  Zone zone = Zone::Z1;
  double gamma = 0.0;
  double average = 0.0;       // (alpha_1 + alpha_{p+1}) theta / (2(1-theta))
  double alpha_branch = 0.0;  // alpha_u + alpha_1 theta/(1-theta)
  double theta_branch = 0.0;  // alpha_{p+1} theta + alpha_1 theta/(1-theta)
  bool average_active = false;
  bool alpha_active = false;
  bool theta_active = false;

  // Active branches joined with '+', e.g. "average+alpha".
  std::string branches() const;
};

ZoneLabel zone_classify(const ModelParams& params, double tie_tol = 1e-12);

}  // namespace freeze
