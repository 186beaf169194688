#include <doctest.h>

#include <cmath>
#include <random>

#include "freeze/acceptance.hpp"
#include "freeze/errors.hpp"
#include "freeze/pressure.hpp"

using namespace freeze;
using doctest::Approx;

TEST_CASE("beta = 0 gives log(Np+1)") {
  for (auto [N, p] : {std::pair{2, 2}, {2, 3}, {3, 2}, {4, 2}, {5, 4}}) {
    std::mt19937_64 rng(static_cast<unsigned>(N * 10 + p));
    auto m = random_params(rng);
    while (m.N != N || m.p != p) m = random_params(rng);
    const auto sol = solve_pressure(m, 0.0);
    CHECK(std::abs(sol.P - std::log(N * p + 1.0)) <= 1e-12);
  }
}

TEST_CASE("residual signs at the ends of the bracket") {
  const auto m = example_params();
  for (double d = 1e-12; d < 1; d *= 10) CHECK(log_balance(m, 10, 2 * d) < log_balance(m, 10, d));
  CHECK(residual(m, 0.0, std::log(5.0)) == Approx(0.0).epsilon(1e-15).scale(1.0));
  CHECK(residual(m, 3.0, std::log(5.0)) < 0.0);
  // Each F_j/(1+F_j) is below 1, so near log p the residual is positive but
  // bounded by N - 1 + e^{-P - alpha_u beta}.
  const double near = residual(m, 3.0, std::log(2.0) + 1e-10);
  CHECK(near > 0.0);
  CHECK(near <= 1.0 + 0.5 * std::exp(-0.9));
  CHECK_THROWS_AS(residual(m, 3.0, std::log(2.0)), DivergentSeries);
}

TEST_CASE("property: residual and log-balance strictly decreasing") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const auto m = random_params(rng);
    const double d = std::exp(-30 * u(rng));
    const double b = 20 * u(rng);
    // Strict in exact arithmetic; in doubles the step can fall below resolution.
    CHECK(log_balance(m, b, d * 1.001) <= log_balance(m, b, d));
    // The plain residual only resolves differences while the block terms are O(1).
    const double beta = 2 * u(rng);
    const double lo = std::log(static_cast<double>(m.p));
    const double hi = std::log(m.N * m.p + 1.0);
    const double P = lo + (0.01 + 0.98 * u(rng)) * (hi - lo);
    CHECK(residual(m, beta, P + 1e-6) < residual(m, beta, P));
  }
}

TEST_CASE("solution invariants on random draws") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 60; ++t) {
    const auto m = random_params(rng);
    const double beta = 30 * u(rng);
    const auto sol = solve_pressure(m, beta);
    CHECK(sol.excess > 0.0);
    CHECK(sol.P <= std::log(m.N * m.p + 1.0) + 1e-15);
    CHECK(std::abs(sol.residual) <= 1e-12);
    CHECK(sol.g() > 0.0);
    CHECK(sol.bracket_lo <= sol.excess);
    CHECK(sol.excess <= sol.bracket_hi);
    SolverOptions tight;
    tight.tol = 1e-13;
    CHECK(std::abs(solve_pressure(m, beta, tight).P - sol.P) < 1e-12);
  }
}

TEST_CASE("P(beta) decreasing and convex, excess decreasing") {
  const auto m = example_params();
  std::vector<double> betas;
  for (double b = 0; b <= 60; b += 0.5) betas.push_back(b);
  const auto sols = solve_pressure_grid(m, betas);
  REQUIRE(sols.size() == betas.size());
  for (std::size_t k = 1; k < sols.size(); ++k) {
    CHECK(sols[k].beta == betas[k]);
    CHECK(sols[k].P <= sols[k - 1].P);
    CHECK(sols[k].excess < sols[k - 1].excess);
  }
  for (std::size_t k = 1; k + 1 < sols.size(); ++k)
    CHECK(sols[k + 1].P - 2 * sols[k].P + sols[k - 1].P >= -1e-9);
}

TEST_CASE("grid results do not depend on the thread count") {
  const auto m = example_params();
  const std::vector<double> betas{0, 3, 7, 11, 40, 90};
  const auto a = solve_pressure_grid(m, betas, {}, 1);
  const auto b = solve_pressure_grid(m, betas, {}, 4);
  for (std::size_t k = 0; k < betas.size(); ++k) {
    CHECK(a[k].P == b[k].P);
    CHECK(a[k].excess == b[k].excess);
  }
}

TEST_CASE("decay rate of the excess is gamma") {
  const auto m = example_params();
  const double l20 = solve_pressure(m, 20).log_excess;
  const double l80 = solve_pressure(m, 80).log_excess;
  CHECK(-(l80 - l20) / 60 == Approx(1.25).epsilon(0.05));
}

TEST_CASE("out of range beyond the smallest excess") {
  CHECK_THROWS_AS(solve_pressure(example_params(), 600.0), OutOfRange);
  CHECK(largest_solvable_beta(example_params()) >= 500);
}

TEST_CASE("limit constants with I = 0, uncorrected convention") {
  const auto u = LimitConvention::Uncorrected;
  const auto z1 = limit_from_constants(Zone::Z1, 0, 0, 2, u);
  CHECK(z1.beta_r_g == Approx(0.5));
  CHECK(z1.rho2 == Approx(4.0));
  CHECK(z1.w1 == Approx(0.2));
  CHECK(z1.w2 == Approx(0.8));

  const auto z3 = limit_from_constants(Zone::Z3only, 0, 0, 2, u);
  CHECK(1 / z3.beta_r_g == Approx((std::sqrt(17.0) - 1) / 2));
  CHECK(z3.rho2 == Approx(4 / (18 - 2 * std::sqrt(17.0))));

  const auto z4 = limit_from_constants(Zone::Z4only, 0, 0, 2, u);
  CHECK(1 / z4.beta_r_g == Approx(2.0));

  const auto z2 = limit_from_constants(Zone::Z2, 0, 0, 2, u);
  CHECK_FALSE(z2.g_predicted);
  CHECK(z2.w1 == 1.0);
  CHECK(z2.w2 == 0.0);
}

TEST_CASE("limit constants with I = 0, corrected convention") {
  const auto c = LimitConvention::Corrected;
  const auto z1 = limit_from_constants(Zone::Z1, 0, 0, 2, c);
  CHECK(z1.beta_r_g == Approx(std::sqrt(2.0)));
  CHECK(z1.rho2 == Approx(1.0));
  CHECK(z1.derived_ratio_12 == Approx(1.0));
  CHECK(z1.w1 == Approx(0.5));
}

TEST_CASE("corrected limits match the solver") {
  struct Case {
    ModelParams m;
    double beta;
    double want;
  };
  const Case cases[] = {{example_params(), 400, 0.81649658092772603},
                        {z3_params(), 300, 1.1039126},
                        {z4_params(), 140, 0.78584039},
                        {ModelParams{2, 2, 0.75, {{1, 2}, {2, 3}}, 1.5}, 150, 0.0}};
  for (const auto& c : cases) {
    const auto pred = g_limit_prediction(c.m);
    REQUIRE(pred.g_predicted);
    if (c.want > 0) CHECK(pred.beta_r_g == Approx(c.want).epsilon(1e-7));
    const auto sol = solve_pressure(c.m, c.beta);
    CHECK(sol.beta_r_g(c.m) == Approx(pred.beta_r_g).epsilon(1e-4));
  }
}

TEST_CASE("p = 3 corrected prediction against the solver") {
  ModelParams m{2, 3, 0.5, {{1, 1.5, 2}, {1.5, 2, 3.5}}, 0.3};
  REQUIRE(validate(m).empty());
  const auto pred = g_limit_prediction(m);
  REQUIRE(pred.zone.zone == Zone::Z1);
  CHECK(solve_pressure(m, 400).beta_r_g(m) == Approx(pred.beta_r_g).epsilon(1e-4));
}

TEST_CASE("parse_convention") {
  CHECK(parse_convention("corrected") == LimitConvention::Corrected);
  CHECK(parse_convention("uncorrected") == LimitConvention::Uncorrected);
  CHECK_THROWS_AS(parse_convention("published"), ConfigError);
}
