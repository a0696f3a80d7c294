#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "epr/gaussian.hpp"

using namespace epr;

TEST_CASE("variances_from_r at the reference points", "[gaussian]") {
  CHECK(variances_from_r(0.0).v_sum_x == 1.0);
  CHECK(variances_from_r(0.0).v_diff_y == 1.0);

  CHECK(variances_from_r(1.0).v_sum_x ==
        Catch::Approx(0.1353352832366127).epsilon(1e-12));

  // r = 0.80: e^(-1.6), about -6.95 dB
  const auto v = variances_from_r(0.80);
  CHECK(v.v_sum_x == Catch::Approx(0.20189651799465538).epsilon(1e-12));
  CHECK(db_from_linear(v.v_sum_x) == Catch::Approx(-6.94871171).margin(1e-6));

  CHECK_THROWS_AS(variances_from_r(-0.1), std::domain_error);
  CHECK_THROWS_AS(variances_from_r(std::nan("")), std::domain_error);
}

TEST_CASE("variances_from_r is strictly decreasing with r -> 0 limit",
          "[gaussian]") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 8.0);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng), b = u(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    CHECK(variances_from_r(b).v_sum_x < variances_from_r(a).v_sum_x);
  }
  CHECK(variances_from_r(400.0).v_sum_x == 0.0);  // underflow to the limit
}

TEST_CASE("duan_sum on the measured pair and the boundary", "[gaussian]") {
  // the two channels quoted against the QNL: -6.08 dB and -6.22 dB
  const CorrelationVariances measured{linear_from_db(-6.08),
                                      linear_from_db(-6.22)};
  const auto result = duan_sum(measured);
  CHECK(result.sum == Catch::Approx(0.4853850620).margin(1e-9));
  CHECK(result.entangled);

  const auto coherent = duan_sum({1.0, 1.0});
  CHECK(coherent.sum == 2.0);
  CHECK_FALSE(coherent.entangled);  // the bound itself is separable

  // one squeezed quadrature alone does not certify entanglement
  const auto lopsided = duan_sum({0.5, 1.6});
  CHECK(lopsided.sum == Catch::Approx(2.1).margin(1e-12));
  CHECK_FALSE(lopsided.entangled);

  CHECK_THROWS_AS(duan_sum({0.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(duan_sum({1.0, -0.2}), std::domain_error);
}

TEST_CASE("duan_sum is symmetric and sub-bound for every r > 0", "[gaussian]") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(1e-3, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(duan_sum({a, b}).sum == duan_sum({b, a}).sum);

    const double r = u(rng);
    CHECK(duan_sum(variances_from_r(r)).sum < 2.0);
  }
  CHECK(duan_sum(variances_from_r(0.0)).sum == 2.0);
}

TEST_CASE("dB conversions at the quoted levels", "[gaussian]") {
  CHECK(db_from_linear(1.0) == 0.0);
  CHECK(linear_from_db(0.0) == 1.0);
  CHECK(db_from_linear(0.5) == Catch::Approx(-3.0102999566).margin(1e-9));
  CHECK(db_from_linear(0.2466) == Catch::Approx(-6.08).margin(1e-3));
  CHECK(linear_from_db(-6.22) == Catch::Approx(0.2388).margin(1e-4));
  CHECK(linear_from_db(-11.3) == Catch::Approx(0.0741310241).margin(1e-9));

  CHECK_THROWS_AS(db_from_linear(0.0), std::domain_error);
  CHECK_THROWS_AS(db_from_linear(-1.0), std::domain_error);
  CHECK_THROWS_AS(linear_from_db(std::numeric_limits<double>::infinity()),
                  std::domain_error);
}

TEST_CASE("dB/linear round trip over twelve decades", "[gaussian]") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> exp10(-6.0, 6.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::pow(10.0, exp10(rng));
    CHECK(linear_from_db(db_from_linear(v)) == Catch::Approx(v).epsilon(1e-12));
  }
}
