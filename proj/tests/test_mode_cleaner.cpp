#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "epr/mode_cleaner.hpp"

using namespace epr;

TEST_CASE("cavity pole transfer function", "[mode_cleaner]") {
  CHECK(lowpass_power_transfer(0.0, mc2) == 1.0);
  // -3 dB at the half width by construction
  CHECK(lowpass_power_transfer(300e3, mc2) == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(lowpass_power_transfer(500e3, mc1) == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(lowpass_power_transfer(2e6, mc2) ==
        Catch::Approx(0.0220048900).margin(1e-9));
  CHECK_THROWS_AS(lowpass_power_transfer(-1.0, mc2), std::domain_error);
  CHECK_THROWS_AS(lowpass_power_transfer(1e6, ModeCleanerParams{0.0, 1000.0}),
                  std::domain_error);
  CHECK_THROWS_AS(lowpass_power_transfer(1e6, ModeCleanerParams{600e3, 1.0}),
                  std::domain_error);
}

TEST_CASE("transfer is monotone decreasing in frequency", "[mode_cleaner]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uf(0.0, 20e6);
  for (int i = 0; i < 1000; ++i) {
    const double f = uf(rng);
    CHECK(lowpass_power_transfer(f + 1e3, mc2) < lowpass_power_transfer(f, mc2));
  }
}

TEST_CASE("pump excess noise is filtered to the QNL at 2 MHz", "[mode_cleaner]") {
  // the phase quadrature carried 1 dB of excess at 2 MHz without the cleaner
  const auto phase = filter_excess_noise({2e6, 1.0}, mc2);
  CHECK(phase.excess_db == Catch::Approx(0.0246742461).margin(1e-8));
  CHECK(phase.excess_db < 0.05);

  // the amplitude quadrature carried 0.5 dB
  const auto amp = filter_excess_noise({2e6, 0.5}, mc2);
  CHECK(amp.excess_db == Catch::Approx(0.0116451917).margin(1e-8));
  CHECK(amp.excess_db < 0.05);
}

TEST_CASE("vacuum noise is not filtered below the QNL", "[mode_cleaner]") {
  CHECK(filter_excess_noise({2e6, 0.0}, mc2).excess_db == 0.0);
  // far above the pole everything classical is gone
  CHECK(filter_excess_noise({1e12, 3.0}, mc2).excess_db ==
        Catch::Approx(0.0).margin(1e-9));
  CHECK_THROWS_AS(filter_excess_noise({2e6, -0.5}, mc2), std::domain_error);
  CHECK_THROWS_AS(filter_excess_noise({0.0, 1.0}, mc2), std::domain_error);
}

TEST_CASE("filtering never amplifies and never digs below QNL",
          "[mode_cleaner]") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> uf(1e3, 50e6), ue(0.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const ExcessNoisePoint p{uf(rng), ue(rng)};
    const auto q = filter_excess_noise(p, mc2);
    CHECK(q.excess_db >= 0.0);
    CHECK(q.excess_db <= p.excess_db);
    if (p.excess_db > 0.0) CHECK(q.excess_db < p.excess_db);
  }
}
