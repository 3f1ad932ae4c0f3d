#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "crowdsense/errors.hpp"
#include "crowdsense/tail_prob.hpp"
#include "oracles.hpp"

using namespace crowdsense;

TEST_CASE("success threshold") {
  CHECK(success_threshold(10, 0.8) == 8);
  CHECK(success_threshold(10, 0.75) == 8);
  CHECK(success_threshold(70, 1.0) == 70);
  CHECK(success_threshold(70, 0.9) == 63);
  CHECK(success_threshold(10, 0.01) == 1);
  // 10 * 0.7 rounds to 7.000000000000001 in binary floating point
  CHECK(success_threshold(10, 0.7) == 7);
  CHECK(success_threshold(100, 0.29) == 29);
  CHECK_THROWS_AS(success_threshold(10, 0.0), DomainError);
  CHECK_THROWS_AS(success_threshold(10, 1.01), DomainError);
}

TEST_CASE("exact tail examples") {
  const std::vector<double> halves3{0.5, 0.5, 0.5};
  CHECK(exact_tail(halves3, 0) == 1.0);
  CHECK(exact_tail(std::vector<double>{1, 1, 1}, 3) == 1.0);
  CHECK(exact_tail(halves3, 2) == doctest::Approx(0.5));
  CHECK(exact_tail(std::vector<double>{0.5, 0.5}, 1) == doctest::Approx(0.75));
  CHECK(exact_lower_tail(std::vector<double>{0.5, 0.5}, 1) == doctest::Approx(0.25));
  CHECK_THROWS_AS(exact_tail(halves3, 4), DomainError);
  CHECK_THROWS_AS(exact_tail(halves3, -1), DomainError);
  CHECK_THROWS_AS(exact_tail(std::vector<double>{1.5}, 1), DomainError);
}

TEST_CASE("binomial tail") {
  CHECK(binomial_tail(5, 1.0, 5) == 1.0);
  CHECK(binomial_tail(2, 0.5, 1) == doctest::Approx(0.75));
  const std::vector<double> rho(70, 0.95);
  CHECK(std::fabs(binomial_tail(70, 0.95, 63) - exact_tail(rho, 63)) <= 1e-12);
}

TEST_CASE("exact tail matches enumeration") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t T = 1 + trial % 12;
    std::vector<double> rho(T);
    for (double& x : rho) x = u(rng);
    for (int k = 0; k <= static_cast<int>(T); ++k) {
      const double expected = oracle::enumerate_tail(rho, k);
      CHECK(std::fabs(exact_tail(rho, k) - expected) <= 1e-12);
      CHECK(std::fabs(exact_lower_tail(rho, k) - (1.0 - expected)) <= 1e-12);
    }
  }
}

TEST_CASE("exact tail monotonicity") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t T = 1 + trial % 30;
    std::vector<double> rho(T);
    for (double& x : rho) x = u(rng);
    for (int k = 1; k <= static_cast<int>(T); ++k) CHECK(exact_tail(rho, k) <= exact_tail(rho, k - 1) + 1e-15);
    const int k = 1 + static_cast<int>(rng() % T);
    auto raised = rho;
    const std::size_t i = rng() % T;
    raised[i] = raised[i] + (1.0 - raised[i]) * u(rng);
    CHECK(exact_tail(raised, k) >= exact_tail(rho, k) - 1e-15);
  }
}

TEST_CASE("Monte Carlo tail") {
  CHECK(monte_carlo_tail(std::vector<double>{1, 1, 1}, 3, 100, 1).value == 1.0);
  CHECK(monte_carlo_tail(std::vector<double>{0, 0, 0}, 1, 100, 1).value == 0.0);
  const std::vector<double> halves{0.5, 0.5, 0.5};
  const auto est = monte_carlo_tail(halves, 2, 100000, 12345);
  CHECK(est.method == TailMethod::MonteCarlo);
  CHECK(est.samples == 100000);
  CHECK(est.std_error == doctest::Approx(std::sqrt(est.value * (1 - est.value) / 1e5)));
  CHECK(std::fabs(est.value - 0.5) <= 3.0 * 0.0015811);
  // value is a multiple of 1/N
  CHECK(std::fabs(est.value * 1e5 - std::round(est.value * 1e5)) < 1e-6);
  CHECK(monte_carlo_tail(halves, 2, 1000, 99) == monte_carlo_tail(halves, 2, 1000, 99));
  CHECK_FALSE(monte_carlo_tail(halves, 2, 1000, 99) == monte_carlo_tail(halves, 2, 1000, 100));
  CHECK_THROWS_AS(monte_carlo_tail(halves, 2, 0, 1), DomainError);
}

TEST_CASE("inverse normal CDF") {
  CHECK(std::fabs(inverse_normal_cdf(0.5)) < 1e-15);
  for (const auto& q : oracle::kNormalQuantiles) {
    CHECK(std::fabs(inverse_normal_cdf(q.beta) - q.x) <= 1e-8);
  }
  for (int i = 0; i < 5; ++i) {
    const double beta = 0.91 + 0.02 * i;
    CHECK(std::fabs(normal_cdf(inverse_normal_cdf(beta)) - beta) <= 1e-8);
  }
  for (double beta : {1e-10, 1e-4, 0.02, 0.3, 0.7, 0.98, 1 - 1e-4, 1 - 1e-10}) {
    CHECK(std::fabs(normal_cdf(inverse_normal_cdf(beta)) - beta) <= 1e-8 * std::max(1e-6, beta));
  }
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), DomainError);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), DomainError);
}
