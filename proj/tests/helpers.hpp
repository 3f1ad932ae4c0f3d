#pragma once

#include <random>
#include <vector>

#include "crowdsense/core_model.hpp"

namespace testing_support {

using namespace crowdsense;

// Scenario with the same curve in every cell.
inline Scenario uniform_scenario(std::size_t T, std::size_t L, int r, double scale, double exponent,
                                 RobustnessSpec spec) {
  return Scenario(Matrix<int>(T, L, r), Matrix<BiddingCurve>(T, L, BiddingCurve::power(scale, exponent)),
                  std::move(spec));
}

// Random power-law scenario; std::mt19937_64 keeps it independent of the
// library's generator.
struct RandomScenarioRanges {
  int r_high = 36;
  double scale_low = 1.0;
  double scale_high = 6.0;
  double exp_low = 1.0;
  double exp_high = 4.0;
};

inline Scenario random_scenario(std::mt19937_64& rng, std::size_t T, std::size_t L, RobustnessSpec spec,
                                const RandomScenarioRanges& ranges = {}) {
  std::uniform_int_distribution<int> r_dist(1, ranges.r_high);
  std::uniform_real_distribution<double> s_dist(ranges.scale_low, ranges.scale_high);
  std::uniform_real_distribution<double> p_dist(ranges.exp_low, ranges.exp_high);
  Matrix<int> r(T, L, 1);
  Matrix<BiddingCurve> curves(T, L, BiddingCurve{});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t l = 0; l < L; ++l) {
      r(t, l) = r_dist(rng);
      curves(t, l) = BiddingCurve::power(s_dist(rng), p_dist(rng));
    }
  }
  return Scenario(std::move(r), std::move(curves), std::move(spec));
}

}  // namespace testing_support
