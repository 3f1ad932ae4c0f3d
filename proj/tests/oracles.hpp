// Test-side reference computations, written without reusing library solvers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "crowdsense/core_model.hpp"

namespace oracle {

// Pr{at least k successes} by summing over all 2^T outcomes.
inline double enumerate_tail(const std::vector<double>& rho, int k) {
  const std::size_t T = rho.size();
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << T); ++mask) {
    double p = 1.0;
    int successes = 0;
    for (std::size_t t = 0; t < T; ++t) {
      if (mask & (1u << t)) {
        p *= rho[t];
        ++successes;
      } else {
        p *= 1.0 - rho[t];
      }
    }
    if (successes >= k) total += p;
  }
  return total;
}

// f(x) = r c x^(p+1).
struct PowerTerm {
  int r;
  double c;
  double p;
  double value(double x) const { return r * c * std::pow(x, p + 1.0); }
};

struct GridResult {
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> rho;
};

// min sum f_i(x_i) s.t. sum x_i >= gamma, x in [0,1]^n, n <= 4, all but the
// last coordinate on a grid of the given step; the last coordinate is
// max(0, gamma - rest). With the first n-2 coordinates fixed, the remaining
// pair lies on a line along which the objective is convex, so that 1-D grid
// is minimized exactly by ternary search on indices.
inline GridResult grid_budgeted_exact_last(const std::vector<PowerTerm>& f, double gamma, double step) {
  const std::size_t n = f.size();
  const int m = static_cast<int>(std::lround(1.0 / step));
  std::vector<std::vector<double>> table(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j <= m; ++j) table[i].push_back(f[i].value(j * step));
  }
  GridResult best;
  auto last_cost = [&](double rest) {
    const double x = std::max(0.0, gamma - rest);
    return x > 1.0 + 1e-12 ? std::numeric_limits<double>::infinity() : f[n - 1].value(std::min(x, 1.0));
  };
  if (n == 1) {
    best.objective = last_cost(0.0);
    best.rho = {std::clamp(gamma, 0.0, 1.0)};
    return best;
  }
  std::vector<int> idx(n - 1, 0);
  auto line_min = [&](double fixed_cost, double fixed_mass) {
    // coordinate n-2 on the grid, coordinate n-1 exact
    auto cost = [&](int j) { return fixed_cost + table[n - 2][j] + last_cost(fixed_mass + j * step); };
    int lo = 0;
    int hi = m;
    while (hi - lo > 2) {
      const int a = lo + (hi - lo) / 3;
      const int b = hi - (hi - lo) / 3;
      const double ca = cost(a);
      if (std::isinf(ca) || ca > cost(b)) lo = a; else hi = b;
    }
    for (int j = lo; j <= hi; ++j) {
      const double c = cost(j);
      if (c < best.objective) {
        best.objective = c;
        idx[n - 2] = j;
        best.rho.assign(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) best.rho[i] = idx[i] * step;
        best.rho[n - 1] = std::min(1.0, std::max(0.0, gamma - fixed_mass - j * step));
      }
    }
  };
  if (n == 2) {
    line_min(0.0, 0.0);
  } else if (n == 3) {
    for (int a = 0; a <= m; ++a) {
      idx[0] = a;
      line_min(table[0][a], a * step);
    }
  } else {
    for (int a = 0; a <= m; ++a) {
      for (int b = 0; b <= m; ++b) {
        idx[0] = a;
        idx[1] = b;
        line_min(table[0][a] + table[1][b], (a + b) * step);
      }
    }
  }
  return best;
}

// Best of grid_budgeted_exact_last over every choice of the exact coordinate,
// so an optimum with a coordinate at 1 is not forced onto the grid elsewhere.
inline GridResult grid_budgeted(const std::vector<PowerTerm>& f, double gamma, double step) {
  GridResult best;
  for (std::size_t free = 0; free < f.size(); ++free) {
    std::vector<PowerTerm> order = f;
    std::swap(order[free], order.back());
    GridResult r = grid_budgeted_exact_last(order, gamma, step);
    if (r.objective < best.objective) {
      std::swap(r.rho[free], r.rho.back());
      best = std::move(r);
    }
  }
  return best;
}

// Standard normal quantiles computed independently (high-precision reference
// values) for the beta levels the tests need.
struct Quantile {
  double beta;
  double x;
};
inline constexpr Quantile kNormalQuantiles[] = {
    {0.95, 1.6448536269514722},
    {0.975, 1.959963984540054},
    {0.98, 2.0537489106318225},
};

}  // namespace oracle
