#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "freeze/errors.hpp"
#include "freeze/series.hpp"

using namespace freeze;
using doctest::Approx;

namespace {

// Reference I(eta) by double-exponential quadrature, independent of the
// adaptive Simpson plus dyadic scheme in the library.
double reference_I(const std::vector<double>& eta) {
  const double p = static_cast<double>(eta.size() + 1);
  auto near = [&](double x) {
    double s = 0.0;
    for (double e : eta) s += std::expm1(-e * x);
    return std::log1p(s / p) / x;
  };
  auto far = [&](double x) {
    double num = 0.0, den = 1.0;
    for (double e : eta) {
      num += e * std::exp(-e * x);
      den += std::exp(-e * x);
    }
    return num / den * std::log(x);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  return ts.integrate(near, 0.0, 1.0) + es.integrate(far, 1.0, std::numeric_limits<double>::infinity());
}

}  // namespace

TEST_CASE("s_factor") {
  const std::vector<double> zero{0.0, 0.0};
  CHECK(s_factor(zero, 0.5, 1) == Approx(std::log(2.0)));
  const std::vector<double> one{3.0};
  CHECK(s_factor(one, 0.5, 2) == Approx(-0.75));
  const std::vector<double> z{100.0, 200.0};
  CHECK(s_factor(z, 0.5, 1) == Approx(-50.0 + std::log1p(std::exp(-50.0))).epsilon(1e-15));
}

TEST_CASE("F closed forms and divergence") {
  const std::vector<double> zero{0.0, 0.0};
  CHECK(F(std::log(4.0), zero, 0.5).value() == Approx(1.0).epsilon(1e-13));
  CHECK(F(std::log(3.0), zero, 0.5).value() == Approx(2.0).epsilon(1e-13));
  CHECK_THROWS_AS(F(std::log(2.0), zero, 0.5), DivergentSeries);
  CHECK_THROWS_AS(F(0.5, zero, 0.5), DivergentSeries);
}

TEST_CASE("F_truncated") {
  const std::vector<double> zero{0.0, 0.0};
  CHECK(F_truncated(std::log(4.0), zero, 0.5, 2).value() == Approx(0.75).epsilon(1e-15));
  const std::vector<double> z{1.0, 2.5};
  const double Z = 1.1;
  CHECK(F_truncated(Z, z, 0.5, 1).log_value == Approx(-Z + s_factor(z, 0.5, 1)).epsilon(1e-15));
  const auto full = F(Z, z, 0.5, 1e-15);
  const auto part = F_truncated(Z, z, 0.5, 400);
  CHECK(part.log_value == Approx(full.log_value).epsilon(1e-13));
}

TEST_CASE("G closed form and G >= F") {
  const std::vector<double> zero{0.0, 0.0};
  CHECK(G(std::log(4.0), zero, 0.5).value() == Approx(2.0).epsilon(1e-13));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const std::vector<double> z{5 * u(rng), 5 + 5 * u(rng)};
    const double Z = std::log(2.0) + 1e-6 + u(rng);
    CHECK(G(Z, z, 0.6).log_value >= F(Z, z, 0.6).log_value);
  }
}

TEST_CASE("F_prefixed") {
  const std::vector<double> z{1.0, 2.0};
  const double Z = 0.9;
  CHECK(F_prefixed(Z, z, 0.5, 0.0).log_value == Approx(F(Z, z, 0.5).log_value).epsilon(1e-14));
  CHECK(F_prefixed(Z, z, 0.5, -1e12).value() < 1e-3);
  CHECK(F_prefixed(Z, z, 0.5, -1e12).log_value < F_prefixed(Z, z, 0.5, -1e4).log_value);
  double prev = -std::numeric_limits<double>::infinity();
  for (double S = -20; S <= 0; S += 0.5) {
    const double v = F_prefixed(Z, z, 0.5, S).log_value;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("excess variants agree with the plain ones where both resolve") {
  const std::vector<double> z{2.0, 3.5};
  for (double delta : {1e-3, 0.1, 1.0}) {
    const double Z = std::log(2.0) + delta;
    CHECK(F_excess(delta, z, 0.7).log_value == Approx(F(Z, z, 0.7).log_value).epsilon(1e-11));
    CHECK(G_excess(delta, z, 0.7).log_value == Approx(G(Z, z, 0.7).log_value).epsilon(1e-11));
    CHECK(F_prefixed_excess(delta, z, 0.7, -2.0).log_value ==
          Approx(F_prefixed(Z, z, 0.7, -2.0).log_value).epsilon(1e-11));
  }
}

TEST_CASE("near the boundary F ~ 1/delta and the tail is summed in closed form") {
  const std::vector<double> z{1.0, 2.0};
  const auto a = F_excess(1e-200, z, 0.5);
  const auto b = F_excess(1e-100, z, 0.5);
  CHECK(a.log_value - b.log_value == Approx(100 * std::log(10.0)).epsilon(1e-12));
  CHECK(a.terms_used < 1000);
}

TEST_CASE("property: certified bounds hold against a tighter re-evaluation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const std::vector<double> z{30 * u(rng), 30 + 30 * u(rng), 60 + 10 * u(rng)};
    const double theta = 0.1 + 0.8 * u(rng);
    const double delta = std::exp(-40 * u(rng));
    for (auto fn : {&F_excess, &G_excess}) {
      const auto loose = fn(delta, z, theta, 1e-8);
      const auto tight = fn(delta, z, theta, 1e-9);
      CHECK(std::abs(std::expm1(loose.log_value - tight.log_value)) <=
            loose.tail_rel_bound + tight.tail_rel_bound + 1e-13);
    }
  }
}

TEST_CASE("property: F, G, F_prefixed decrease in Z and in each z_i") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> z{3 * u(rng), 3 + 3 * u(rng)};
    const double theta = 0.2 + 0.6 * u(rng);
    const double delta = 0.01 + u(rng);
    const double h = 1e-3;
    CHECK(F_excess(delta + h, z, theta).log_value < F_excess(delta, z, theta).log_value);
    CHECK(G_excess(delta + h, z, theta).log_value < G_excess(delta, z, theta).log_value);
    CHECK(F_prefixed_excess(delta + h, z, theta, -1).log_value < F_prefixed_excess(delta, z, theta, -1).log_value);
    for (std::size_t i = 0; i < z.size(); ++i) {
      auto zz = z;
      zz[i] += 0.01;
      CHECK(F_excess(delta, zz, theta).log_value < F_excess(delta, z, theta).log_value);
      CHECK(G_excess(delta, zz, theta).log_value < G_excess(delta, z, theta).log_value);
    }
  }
}

TEST_CASE("I_integral: zero gap and reference values") {
  const std::vector<double> zero{0.0};
  CHECK(I_integral(zero).value == 0.0);
  const std::vector<double> zeros{0.0, 0.0};
  CHECK(I_integral(zeros).value == 0.0);
  const std::vector<double> mixed{0.0, 1.0};
  CHECK_THROWS(I_integral(mixed));

  // 30-digit references.
  const double ln2 = std::log(2.0);
  CHECK(I_integral(std::vector<double>{1.0}).value == Approx(-0.5 * ln2 * ln2).epsilon(1e-11));
  CHECK(I_integral(std::vector<double>{1.5}).value == Approx(-0.52127350345970827409557).epsilon(1e-11));
  CHECK(I_integral(std::vector<double>{0.5}).value == Approx(0.240226506959100712).epsilon(1e-11));
  CHECK(I_integral(std::vector<double>{0.5, 1.0}).value == Approx(0.158025530012517997507).epsilon(1e-11));
}

TEST_CASE("I_integral agrees with double-exponential quadrature") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> eta{0.05 + 5 * u(rng)};
    if (t % 2) eta.push_back(eta[0] + 3 * u(rng));
    const auto v = I_integral(eta);
    CHECK(v.abs_error_bound <= 1e-12);
    CHECK(v.value == Approx(reference_I(eta)).epsilon(1e-9));
  }
}

TEST_CASE("property: I(c eta) = I(eta) - log c log p") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> eta{0.1 + 2 * u(rng), 0.1 + 2 * u(rng), 0.1 + 2 * u(rng)};
    const double c = 0.1 + 5 * u(rng);
    auto scaled = eta;
    for (double& e : scaled) e *= c;
    const double p = static_cast<double>(eta.size() + 1);
    CHECK(I_integral(scaled).value == Approx(I_integral(eta).value - std::log(c) * std::log(p)).epsilon(1e-10));
  }
}

TEST_CASE("r_exponent") {
  CHECK(r_exponent(2, 0.5) == Approx(1.0));
  CHECK(r_exponent(4, 0.5) == Approx(2.0));
  CHECK(r_exponent(2, 0.25) == Approx(0.5));
}

TEST_CASE("product_asymptotic_check") {
  const std::vector<double> xi{1.0, 2.0};
  const auto one = product_asymptotic_check(xi, 0.5, 50.0, 1);
  CHECK(one.lhs == Approx(s_factor(std::vector<double>{50.0, 100.0}, 0.5, 1)));

  // Vanishing gap: I(eps) = I(1) - log(eps) log p grows without bound, so
  // the rhs does not reduce to its elementary part as eps -> 0 even though
  // I(0) = 0.
  const double eps = 1e-9;
  const std::vector<double> flat{1.0, 1.0 + eps};
  const int n = 30;
  const double beta = 40.0;
  const auto pc = product_asymptotic_check(flat, 0.5, beta, n);
  const double elementary =
      n * std::log(2.0) - r_exponent(2, 0.5) * std::log(beta) - 0.5 * (1 - std::pow(0.5, n)) * beta / 0.5;
  const double I_eps = I_integral(std::vector<double>{flat[1] - flat[0]}).value;
  CHECK(I_eps == Approx(-0.5 * std::log(2.0) * std::log(2.0) - std::log(flat[1] - flat[0]) * std::log(2.0)).epsilon(1e-9));
  CHECK(pc.rhs == Approx(elementary - I_eps / std::log(0.5)).epsilon(1e-10));

  // lhs - rhs settles at the boundary constant (log p)/2 rather than 0.
  std::vector<double> off;
  for (double b : {25.0, 50.0, 100.0, 200.0}) {
    const int nb = static_cast<int>(std::ceil(4 * std::log(b) / std::log(2.0)));
    const auto c = product_asymptotic_check(xi, 0.5, b, nb);
    CHECK(c.boundary_constant == Approx(0.5 * std::log(2.0)));
    off.push_back(std::abs(c.lhs - c.rhs - c.boundary_constant));
  }
  for (std::size_t i = 1; i < off.size(); ++i) CHECK(off[i] < off[i - 1]);
  CHECK(off.back() < 1e-6);
}
