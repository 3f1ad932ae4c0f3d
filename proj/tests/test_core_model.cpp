#include <cmath>
#include <random>

#include "doctest.h"

#include "crowdsense/core_model.hpp"
#include "helpers.hpp"

using namespace crowdsense;
using testing_support::uniform_scenario;

TEST_CASE("expected cell payment") {
  const auto cubic = BiddingCurve::power(1.0, 3.0);
  CHECK(expected_cell_payment(0.0, 5, cubic) == 0.0);
  CHECK(expected_cell_payment(1.0, 1, cubic) == doctest::Approx(1.0));
  // 0.5 * 4 * 2 * 0.125
  CHECK(expected_cell_payment(0.5, 4, BiddingCurve::power(2.0, 3.0)) == doctest::Approx(0.5));
  CHECK_THROWS_AS(expected_cell_payment(1.5, 1, cubic), DomainError);
  CHECK_THROWS_AS(expected_cell_payment(-0.1, 1, cubic), DomainError);
}

TEST_CASE("total payment") {
  const auto s11 = uniform_scenario(1, 1, 1, 1.0, 3.0, RobustnessSpec::hard(0.1));
  CHECK(total_payment(PolicyMatrix::constant(1, 1, 0.0), s11) == 0.0);
  CHECK(total_payment(PolicyMatrix::constant(1, 1, 0.9), s11) == doctest::Approx(0.6561).epsilon(1e-12));
  const auto s21 = uniform_scenario(2, 1, 1, 1.0, 3.0, RobustnessSpec::hard(0.1));
  CHECK(total_payment(PolicyMatrix::constant(2, 1, 0.5), s21) == doctest::Approx(0.125));
  CHECK_THROWS_AS(total_payment(PolicyMatrix::constant(1, 2, 0.5), s21), StructuralError);
}

TEST_CASE("joint success probability and expected unsatisfiability") {
  CHECK(joint_success_probability(PolicyMatrix::constant(3, 2, 1.0)) == 1.0);
  Matrix<double> m(2, 2, 0.9);
  m(1, 0) = 0.0;
  CHECK(joint_success_probability(PolicyMatrix(m)) == 0.0);
  CHECK(joint_success_probability(PolicyMatrix::constant(2, 2, 0.9)) == doctest::Approx(0.6561));

  CHECK(expected_unsatisfiability(PolicyMatrix::constant(3, 2, 1.0)) == 0.0);
  CHECK(expected_unsatisfiability(PolicyMatrix::constant(3, 2, 0.0)) == 6.0);
  CHECK(expected_unsatisfiability(PolicyMatrix::constant(2, 2, 0.9)) == doctest::Approx(0.4));
}

TEST_CASE("log-space product matches the direct product to 12 digits") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t T = 1 + trial % 4;
    const std::size_t L = 1 + trial % 4;
    Matrix<double> m(T, L, 0.0);
    double direct = 1.0;
    for (double& x : m.flat()) {
      x = u(rng);
      direct *= x;
    }
    const double logged = joint_success_probability(PolicyMatrix(m));
    CHECK(std::fabs(logged - direct) <= 1e-12 * direct);
  }
}

TEST_CASE("bounded expected failures imply the joint constraint") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t T = 1 + trial % 7;
    const std::size_t L = 1 + (trial / 7) % 3;
    const double eps = 0.001 + 0.998 * u(rng);
    Matrix<double> m(T, L, 0.0);
    double h = 0.0;
    for (double& x : m.flat()) {
      x = u(rng);
      h += 1.0 - x;
    }
    // Shrink the failure mass onto the constraint boundary.
    if (h > eps) {
      for (double& x : m.flat()) x = 1.0 - (1.0 - x) * eps / h;
    }
    const PolicyMatrix p(m);
    CHECK(expected_unsatisfiability(p) <= eps + 1e-12);
    CHECK(joint_success_probability(p) >= 1.0 - eps - 1e-12);
  }
}

TEST_CASE("power curves are increasing and the payment integrand is convex") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> scale(0.5, 10.0);
  std::uniform_real_distribution<double> expo(1.0, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto curve = BiddingCurve::power(scale(rng), expo(rng));
    const int r = 1 + trial % 36;
    CHECK(curve.bid(0.0) == 0.0);
    CHECK(curve.bid(1.0) == doctest::Approx(curve.scale()));
    CHECK(curve.bid(1.0) <= curve.b_max());
    const double h = 1e-4;
    for (int i = 1; i < 100; ++i) {
      const double x = i / 100.0;
      CHECK(curve.derivative(x) > 0.0);
      const double f0 = expected_cell_payment(x - h, r, curve);
      const double f1 = expected_cell_payment(x, r, curve);
      const double f2 = expected_cell_payment(x + h, r, curve);
      CHECK((f2 - 2.0 * f1 + f0) / (h * h) >= -1e-6);
    }
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(BiddingCurve::power(0.0, 3.0), DomainError);
  CHECK_THROWS_AS(BiddingCurve::power(1.0, 0.5), DomainError);
  CHECK_THROWS_AS(BiddingCurve::power(2.0, 3.0, 1.0), DomainError);
  CHECK_THROWS_AS(RobustnessSpec::hard(1.0), DomainError);
  CHECK_THROWS_AS(RobustnessSpec::hard(-0.1), DomainError);
  CHECK_THROWS_AS(RobustnessSpec::soft({0.5}, 1.0), DomainError);
  CHECK_THROWS_AS(RobustnessSpec::soft({0.0}, 0.9), DomainError);
  CHECK_THROWS_AS(RobustnessSpec::soft({1.1}, 0.9), DomainError);
  CHECK_THROWS_AS(PolicyMatrix(Matrix<double>(1, 1, 1.2)), DomainError);
  CHECK_THROWS_AS(Matrix<int>(2, 2, std::vector<int>{1, 2, 3}), StructuralError);
  CHECK_THROWS_AS(uniform_scenario(2, 2, 0, 1.0, 3.0, RobustnessSpec::hard(0.1)), DomainError);
  CHECK_THROWS_AS(uniform_scenario(2, 2, 1, 1.0, 3.0, RobustnessSpec::soft({0.5}, 0.9)), StructuralError);
  CHECK_THROWS_AS(RobustnessSpec::hard(0.1).soft_spec(), DomainError);
}

TEST_CASE("bids and time independence") {
  Matrix<int> r(2, 2, 3);
  r(1, 1) = 4;
  const Scenario s(r, Matrix<BiddingCurve>(2, 2, BiddingCurve::power(2.0, 3.0)),
                   RobustnessSpec::soft({0.5, 0.5}, 0.9));
  CHECK(s.is_time_independent(0));
  CHECK_FALSE(s.is_time_independent(1));
  CHECK_FALSE(s.is_time_independent());
  const auto bids = PolicyMatrix::constant(2, 2, 0.5).bids(s);
  CHECK(bids(1, 1) == doctest::Approx(0.25));
}

TEST_CASE("custom curves") {
  const auto quad = BiddingCurve::custom([](double x) { return 2.0 * x * x; },
                                         [](double x) { return 4.0 * x; }, 2.0);
  CHECK_FALSE(quad.is_power_law());
  CHECK(quad.bid(0.5) == doctest::Approx(0.5));
  CHECK(quad == quad);
  const auto other = BiddingCurve::custom([](double x) { return 2.0 * x * x; },
                                          [](double x) { return 4.0 * x; }, 2.0);
  CHECK_FALSE(quad == other);
  CHECK_THROWS_AS(BiddingCurve::custom([](double x) { return x + 1.0; }, [](double) { return 1.0; }, 3.0),
                  DomainError);
}
