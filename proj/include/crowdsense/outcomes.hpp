#pragma once

#include <vector>

#include "crowdsense/core_model.hpp"

namespace crowdsense {

struct SolverDiagnostics {
  int iterations = 0;
  /// Mass residual sum(rho) - gamma, summed over the independent solves.
  double residual = 0.0;
  /// Required mass handed to the budgeted solver (per location for soft
  /// problems, see SolveOutcome::location_gamma).
  double gamma = 0.0;
  /// Grid-search oracles only: how far the grid optimum may exceed the true
  /// optimum.
  double grid_slack = 0.0;
};

struct SolveOutcome {
  PolicyMatrix policy;
  double objective = 0.0;
  /// Multiplier of the single mass constraint (hard problems).
  double dual = 0.0;
  /// One multiplier and one required mass per location (soft problems).
  std::vector<double> location_dual;
  std::vector<double> location_gamma;
  SolverDiagnostics diagnostics;
};

enum class GapFormula {
  /// lambda * TL(TL-1)/2 * eps^2, from the pairwise Boole remainder.
  Pairwise,
  /// lambda * (TL-1) * eps, from the distance to the relaxation.
  Relaxation,
  /// Minimum of the two above.
  Tightest,
  /// sum_l lambda_l (T - T alpha_l beta - 1 + beta).
  ConservativeSoft,
  /// sum_l lambda_l (gamma_l - T alpha_l beta) for the closed-form policy.
  ClosedFormSoft,
};

const char* to_string(GapFormula formula);

/// Proven upper bound on payment(returned policy) - payment(optimum).
struct GapCertificate {
  double bound = 0.0;
  GapFormula formula = GapFormula::Tightest;
  /// Hard problems: the single multiplier. Soft problems: sum of location
  /// multipliers (informational).
  double dual = 0.0;
  double epsilon = 0.0;
  int cells = 0;
  double pairwise_bound = 0.0;
  double relaxation_bound = 0.0;
  std::vector<double> location_dual;
  std::vector<double> location_bound;
  std::vector<double> location_gamma;
  std::vector<bool> location_clamped;
};

}  // namespace crowdsense
