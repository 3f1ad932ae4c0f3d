#include "crowdsense/tail_prob.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "crowdsense/errors.hpp"
#include "crowdsense/random.hpp"

namespace crowdsense {

namespace {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

void check_tail_args(std::span<const double> rho, int k) {
  if (k < 0 || k > static_cast<int>(rho.size())) {
    throw DomainError("success threshold k=" + std::to_string(k) + " outside [0, " +
                      std::to_string(rho.size()) + "]");
  }
  for (double p : rho) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("trial probability must lie in [0,1], got " + std::to_string(p));
    }
  }
}

struct TailPair {
  double upper;
  double lower;
};

// Distribution of the success count truncated at k: states 0..k-1 are kept
// exactly, reaching k is absorbed into the upper tail.
TailPair tail_dp(std::span<const double> rho, int k) {
  if (k == 0) return {1.0, 0.0};
  std::vector<double> below(static_cast<std::size_t>(k), 0.0);
  below[0] = 1.0;
  KahanSum upper;
  for (double p : rho) {
    const double q = 1.0 - p;
    upper.add(below[k - 1] * p);
    for (int j = k - 1; j >= 1; --j) below[j] = below[j] * q + below[j - 1] * p;
    below[0] *= q;
  }
  KahanSum lower;
  for (double v : below) lower.add(v);
  return {upper.sum, lower.sum};
}

}  // namespace

int success_threshold(int periods, double alpha) {
  if (periods < 1) throw DomainError("number of slots must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in (0,1], got " + std::to_string(alpha));
  }
  const double target = periods * alpha;
  const double nearest = std::round(target);
  const double k = std::abs(target - nearest) <= 1e-9 * std::max(1.0, target) ? nearest
                                                                                : std::ceil(target);
  return std::clamp(static_cast<int>(k), 1, periods);
}

double exact_tail(std::span<const double> rho, int k) {
  check_tail_args(rho, k);
  return std::clamp(tail_dp(rho, k).upper, 0.0, 1.0);
}

double exact_lower_tail(std::span<const double> rho, int k) {
  check_tail_args(rho, k);
  return std::clamp(tail_dp(rho, k).lower, 0.0, 1.0);
}

double binomial_tail(int periods, double p, int k) {
  if (periods < 0) throw DomainError("number of trials must be >= 0");
  const std::vector<double> rho(static_cast<std::size_t>(periods), p);
  return exact_tail(rho, k);
}

TailEstimate monte_carlo_tail(std::span<const double> rho, int k, std::int64_t samples,
                              std::uint64_t seed) {
  check_tail_args(rho, k);
  if (samples < 1) throw DomainError("Monte Carlo needs at least one sample");
  const int trials = static_cast<int>(rho.size());
  Xoshiro256 rng(seed);
  std::int64_t hits = 0;
  for (std::int64_t n = 0; n < samples; ++n) {
    int successes = 0;
    for (int t = 0; t < trials; ++t) {
      if (successes >= k || successes + (trials - t) < k) break;
      if (rng.uniform() < rho[static_cast<std::size_t>(t)]) ++successes;
    }
    if (successes >= k) ++hits;
  }
  TailEstimate e;
  e.method = TailMethod::MonteCarlo;
  e.samples = samples;
  e.seed = seed;
  e.value = static_cast<double>(hits) / static_cast<double>(samples);
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(samples));
  return e;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_normal_cdf(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw DomainError("normal quantile needs beta in (0,1), got " + std::to_string(beta));
  }
  // Acklam's rational approximation.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;

  double x;
  if (beta < low) {
    const double q = std::sqrt(-2.0 * std::log(beta));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (beta <= 1.0 - low) {
    const double q = beta - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-beta));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double e = normal_cdf(x) - beta;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace crowdsense
