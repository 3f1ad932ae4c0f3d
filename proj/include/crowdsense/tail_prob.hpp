#pragma once

#include <cstdint>
#include <span>

namespace crowdsense {

/// Smallest integer k with k >= T * alpha (an integral T * alpha is kept
/// as-is up to 1e-9 relative slack). Result lies in [1, T].
int success_threshold(int periods, double alpha);

/// Pr{at least k of the independent trials succeed}, trial t succeeding with
/// probability rho[t] (Poisson-binomial upper tail). O(T*k) time, O(k) space.
double exact_tail(std::span<const double> rho, int k);

/// Pr{fewer than k successes}, computed directly rather than as 1 - tail so
/// that it keeps full relative precision when the upper tail is close to 1.
double exact_lower_tail(std::span<const double> rho, int k);

/// Upper tail of Binomial(T, p): Pr{X >= k}.
double binomial_tail(int periods, double p, int k);

enum class TailMethod { Exact, MonteCarlo };

struct TailEstimate {
  double value = 0.0;
  TailMethod method = TailMethod::Exact;
  std::int64_t samples = 0;
  double std_error = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const TailEstimate&) const = default;
};

/// Fraction of `samples` simulated T-trial experiments with at least k
/// successes. Bit-for-bit reproducible for a given (rho, k, samples, seed).
TailEstimate monte_carlo_tail(std::span<const double> rho, int k, std::int64_t samples,
                              std::uint64_t seed);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile. Rational approximation (max relative error about
/// 1.2e-9) polished by one Halley step against normal_cdf.
double inverse_normal_cdf(double beta);

}  // namespace crowdsense
