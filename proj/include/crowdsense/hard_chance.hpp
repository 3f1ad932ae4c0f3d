#pragma once

#include "crowdsense/core_model.hpp"
#include "crowdsense/outcomes.hpp"

namespace crowdsense {

/// Expected-failure (Boole) approximation: sum(1 - rho) <= eps, solved as one
/// budgeted problem over all cells with gamma = TL - eps. Its policy is
/// feasible for the joint constraint.
SolveOutcome solve_conservative_hard(const Scenario& scenario);

/// Relaxation sum(1 - rho) <= TL * eps; its payment lower-bounds the optimum
/// of the joint constraint.
SolveOutcome solve_relaxed_hard(const Scenario& scenario);

struct HardFeasibility {
  bool feasible = false;
  /// prod(rho) - (1 - eps).
  double slack = 0.0;
};

HardFeasibility verify_hard_feasibility(const PolicyMatrix& policy, double epsilon);

/// Bound lambda * min{TL(TL-1)/2 eps^2, (TL-1) eps} for an outcome of
/// solve_conservative_hard on the same scenario.
GapCertificate certify_hard_gap(const SolveOutcome& conservative, const Scenario& scenario);

inline constexpr int kBruteForceMaxCells = 4;
inline constexpr double kBruteForceMaxStep = 1e-2;

/// Grid minimization of the payment over {rho : prod(rho) >= 1 - eps}. All
/// but the last cell run over a grid on [1 - eps, 1] anchored at 1; the last
/// cell takes the smallest feasible value. diagnostics.grid_slack is
/// step * sum_i f_i'(1), an upper bound on how far the grid optimum can
/// sit above the true one. Identical cells use the exact symmetric optimum
/// (1 - eps)^(1/n) with zero slack. Test oracle; refuses more than four cells.
SolveOutcome brute_force_hard(const Scenario& scenario, double step = 1e-3);

}  // namespace crowdsense
