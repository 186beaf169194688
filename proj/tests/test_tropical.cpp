#include <doctest.h>

#include <random>

#include "freeze/acceptance.hpp"
#include "freeze/errors.hpp"
#include "freeze/tropical.hpp"

using namespace freeze;
using doctest::Approx;

namespace {

void check_matrix(const MaxPlusMatrix& m, const std::vector<std::vector<double>>& want) {
  REQUIRE(m.rows() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    REQUIRE(m.cols() == want[i].size());
    for (std::size_t j = 0; j < want[i].size(); ++j) {
      if (want[i][j] == kNegInf)
        CHECK(m(i, j) == kNegInf);
      else
        CHECK(m(i, j) == Approx(want[i][j]).epsilon(1e-15));
    }
  }
}

}  // namespace

TEST_CASE("M1 and M2 for the example parameters") {
  const auto m = example_params();
  check_matrix(build_M1(m), {{kNegInf, -0.75, -0.3}, {-0.5, kNegInf, -0.3}});
  check_matrix(build_M2(m), {{-0.5, -1.5}, {-1, -0.75}, {-1, -1.5}});

  auto one = m;
  one.N = 1;
  one.alpha.pop_back();
  CHECK_THROWS_AS(build_M1(one), ConfigError);
  CHECK_THROWS_AS(build_M2(one), ConfigError);
}

TEST_CASE("mp_mul") {
  const auto a = MaxPlusMatrix::from_rows({{0, kNegInf}});
  const auto b = MaxPlusMatrix::from_rows({{5}, {7}});
  check_matrix(mp_mul(a, b), {{5}});

  const auto c = MaxPlusMatrix::from_rows({{1, -2, kNegInf}, {0.5, 3, 4}});
  CHECK(mp_mul(MaxPlusMatrix::identity(2), c) == c);
  CHECK(mp_mul(c, MaxPlusMatrix::identity(3)) == c);
  CHECK_THROWS(mp_mul(c, c));
}

TEST_CASE("M = M1 (x) M2 equals the closed form") {
  const auto m = example_params();
  // Entry by entry: max(-0.75-1, -0.3-1) = -1.3, max(-0.75-0.75, -0.3-1.5) = -1.5,
  // max(-0.5-0.5, -0.3-1) = -1, max(-0.5-1.5, -0.3-1.5) = -1.8.
  check_matrix(build_M(m), {{-1.3, -1.5}, {-1, -1.8}});
  check_matrix(build_M_closed_form(m), {{-1.3, -1.5}, {-1, -1.8}});
}

TEST_CASE("closed-form M: off-diagonal entries depend only on the column") {
  ModelParams m{4, 2, 0.6, {{1, 2}, {1.5, 3}, {2, 2.5}, {2.2, 3}}, 0.7};
  const auto M = build_M_closed_form(m);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t k = 0; k < 4; ++k)
        if (i != j && k != j) CHECK(M(i, j) == M(k, j));
}

TEST_CASE("max_cycle_mean") {
  CHECK(max_cycle_mean(MaxPlusMatrix::from_rows({{-2.5}})) == -2.5);
  CHECK(max_cycle_mean(MaxPlusMatrix::from_rows({{-1, -2}, {-0.5, -3}})) == Approx(-1));
  CHECK(max_cycle_mean(build_M(example_params())) == Approx(-1.25).epsilon(1e-15));
}

TEST_CASE("gamma_closed_form") {
  CHECK(gamma_closed_form(example_params()) == Approx(1.25).epsilon(1e-15));
  CHECK(gamma_closed_form(z2_params()) == Approx(1.1).epsilon(1e-15));
}

TEST_CASE("critical_cycles") {
  const auto m = example_params();
  CHECK(critical_cycles(build_M(m), 1.25) == std::vector<std::vector<int>>{{0, 1}});
  CHECK(critical_cycles(build_M(z2_params()), 1.1) == std::vector<std::vector<int>>{{0}});
}

TEST_CASE("subaction eigenvector") {
  const auto m = example_params();
  const auto V = subaction_eigenvector(m);
  CHECK(V.V_sigma[0] == 0.0);
  CHECK(V.gamma == Approx(1.25));
  CHECK(subaction_residual(m, V) < 1e-12);
  const auto Mv = mp_apply(build_M(m), V.V_sigma);
  for (std::size_t j = 0; j < Mv.size(); ++j) CHECK(Mv[j] == Approx(V.V_sigma[j] - V.gamma).epsilon(1e-14));
  double vu = kNegInf;
  for (int j = 0; j < m.N; ++j) vu = std::max(vu, V.V_sigma[j] - m.lead(j) * m.theta / (1 - m.theta));
  CHECK(V.V_u == Approx(vu).epsilon(1e-15));
}

TEST_CASE("peierls_barrier") {
  const auto m = example_params();
  CHECK(peierls_barrier(m, 0, PointRep::in_sigma(0)) == 0.0);
  CHECK(peierls_barrier(m, 1, PointRep::in_sigma(1)) == 0.0);
  CHECK(peierls_barrier(m, 0, PointRep::ring({Letter::in_block(0, 0)})) == Approx(-0.5));
  CHECK(peierls_barrier(m, 1, PointRep::starting_with_u()) == Approx(-1.5));
}

TEST_CASE("calibrated_subaction_at") {
  const auto m = example_params();
  const auto V = subaction_eigenvector(m);
  CHECK(calibrated_subaction_at(m, V, PointRep::in_sigma(0)) == 0.0);
  const auto x = PointRep::ring({Letter::in_block(0, 0)});
  CHECK(calibrated_subaction_at(m, V, x) == Approx(std::max(-0.5, V.V_sigma[1] - 1.5)));
  for (int j = 0; j < m.N; ++j) {
    CHECK(calibrated_subaction_at(m, V, PointRep::first_letter_ring(j, 1)) == Approx(V.V_ring1[j]).epsilon(1e-15));
    CHECK(calibrated_subaction_at(m, V, PointRep::in_sigma(j)) == Approx(V.V_sigma[j]).epsilon(1e-15));
  }
  CHECK(calibrated_subaction_at(m, V, PointRep::starting_with_u()) == Approx(V.V_u).epsilon(1e-15));
}

TEST_CASE("zone_classify") {
  auto z = zone_classify(example_params());
  CHECK(z.zone == Zone::Z1);
  CHECK(z.gamma == Approx(1.25));
  CHECK(z.branches() == "average");

  z = zone_classify(z2_params());
  CHECK(z.zone == Zone::Z2);

  z = zone_classify(z3_params());
  CHECK(z.zone == Zone::Z3only);
  CHECK(z.branches() == "average+alpha");

  z = zone_classify(z4_params());
  CHECK(z.zone == Zone::Z4only);
  CHECK(z.branches() == "average+theta");

  ModelParams both{2, 2, 0.75, {{1, 2}, {2, 3}}, 1.5};
  CHECK(zone_classify(both).zone == Zone::Z3andZ4);

  // Slightly off the boundary: a loose tie tolerance still places it on it.
  auto near = z3_params();
  near.alpha_u += 1e-9;
  CHECK(zone_classify(near).zone == Zone::Z1);
  CHECK(zone_classify(near, 1e-6).zone == Zone::Z3only);
}

TEST_CASE("property: random draws") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 500; ++t) {
    const auto m = random_params(rng);
    REQUIRE(validate(m).empty());
    const auto M = build_M(m);
    const double g = gamma_closed_form(m);
    CHECK(-max_cycle_mean(M) == Approx(g).epsilon(1e-13));
    CHECK(mp_distance(M, build_M_closed_form(m)) <= 1e-13);
    CHECK(g > m.lead(0) * m.theta / (1 - m.theta));
    for (const auto& c : critical_cycles(M, g)) CHECK((c == std::vector<int>{0} || c == std::vector<int>{0, 1}));

    const auto z = zone_classify(m);
    CHECK(z.gamma == Approx(g).epsilon(1e-15));
    if (m.theta <= 0.5) CHECK((z.zone != Zone::Z4only && z.zone != Zone::Z3andZ4));

    const auto V = subaction_eigenvector(m);
    CHECK(subaction_residual(m, V) < 1e-12);
    for (int i = 0; i < m.N; ++i)
      CHECK(calibrated_subaction_at(m, V, PointRep::in_sigma(i)) == Approx(V.V_sigma[i]).epsilon(1e-13));
  }
}
