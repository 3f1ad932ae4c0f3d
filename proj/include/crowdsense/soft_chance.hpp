#pragma once

#include <cstdint>
#include <vector>

#include "crowdsense/core_model.hpp"
#include "crowdsense/errors.hpp"
#include "crowdsense/outcomes.hpp"
#include "crowdsense/separable_solver.hpp"

namespace crowdsense {

/// Budgeted problem over the T cells of column l with required mass gamma.
BudgetedSolution solve_location_subproblem(const Scenario& scenario, std::size_t location,
                                           double gamma);

/// Relaxation: gamma_l = T alpha_l beta per location. Its payment
/// lower-bounds the optimum of the soft constraints.
SolveOutcome solve_relaxed_soft(const Scenario& scenario);

/// Conservative approximation: gamma_l = T - 1 + beta per location.
SolveOutcome solve_conservative_soft(const Scenario& scenario);

struct BinarySearchParams {
  double sigma_hi = 0.02;
  double sigma_lo = 0.01;
  std::int64_t mc_samples = 500;
  std::uint64_t master_seed = 0;
  int max_bisect = 64;
  int escalation_factor = 10;
  int max_escalations = 3;
  /// Interval width below which a search attempt is declared stuck.
  double min_width = 1e-9;
  /// Redraw q at the upper endpoint before each band test instead of reusing
  /// the midpoint estimate that moved it.
  bool fresh_draws = false;
  /// After the last escalation, return the all-one column when the exact
  /// q(T) = 1 - beta lies in the band instead of failing.
  bool fall_back_to_full = false;
  /// Move the lower endpoint only when q(mid) < 0 instead of q(mid) <
  /// sigma_lo. With this rule a midpoint with 0 <= q < sigma_lo becomes the
  /// upper endpoint and leaves the band out of reach; kept for comparison.
  bool split_at_zero = false;
};

/// Throws ConfigError unless sigma_hi > sigma_lo > 0, the band is reachable
/// (1 - beta >= sigma_lo), mc_samples >= 1, max_bisect >= 1 and the
/// escalation settings are sane.
void validate_search_params(const BinarySearchParams& params, double beta);

struct SearchStep {
  int escalation = 0;
  int iteration = 0;
  double gamma = 0.0;
  double q = 0.0;
  std::int64_t samples = 0;
};

struct LocationSearch {
  double gamma_final = 0.0;
  /// Monte Carlo estimate of tail - beta at gamma_final.
  double q_estimate = 0.0;
  /// Exact tail at the returned column.
  double exact_tail_check = 0.0;
  int k = 0;
  int bisect_iters = 0;
  std::int64_t samples = 0;
  int escalations = 0;
  bool fell_back = false;
  double dual = 0.0;
  std::vector<SearchStep> trajectory;
};

struct SoftSolveOutcome {
  PolicyMatrix policy;
  double objective = 0.0;
  std::vector<LocationSearch> per_location;
};

/// Raised when a location's search exhausts every escalation level.
class NonTerminationError : public Error {
 public:
  NonTerminationError(std::size_t location, std::vector<SearchStep> trajectory);
  std::size_t location() const { return location_; }
  const std::vector<SearchStep>& trajectory() const { return trajectory_; }

 private:
  std::size_t location_;
  std::vector<SearchStep> trajectory_;
};

/// Binary search on gamma_l per location, with Monte Carlo estimates of the
/// success tail, until q(gamma_hi) = tail - beta lands in [sigma_lo,
/// sigma_hi]. The midpoint becomes the lower endpoint when q(mid) < sigma_lo
/// and the upper endpoint otherwise, so the upper endpoint always carries an
/// estimate at or above the band floor. Locations run in parallel on independent seeded substreams.
SoftSolveOutcome binary_search_policy(const Scenario& scenario, const BinarySearchParams& params);

/// Bound sum_l lambda_l (T - T alpha_l beta - 1 + beta), lambda_l from the
/// conservative subproblems.
GapCertificate certify_soft_gap(const Scenario& scenario);

struct ClosedFormValue {
  double unclamped = 0.0;
  double value = 0.0;
  bool clamped = false;
};

/// Normal-approximation acceptance probability alpha + x_beta sqrt(alpha/T),
/// clamped to 1.
ClosedFormValue closed_form_acceptance(int periods, double alpha, double beta);

struct ClosedFormOutcome {
  PolicyMatrix policy;
  double objective = 0.0;
  std::vector<ClosedFormValue> per_location;
};

/// Constant-column policy from closed_form_acceptance. Requires every column
/// to be time-independent (StructuralError otherwise).
ClosedFormOutcome closed_form_policy(const Scenario& scenario);

/// Bound sum_l lambda_l (gamma_l - T alpha_l beta) with
/// gamma_l = T alpha_l + x_beta sqrt(T alpha_l), clamped to T (flagged).
GapCertificate certify_closed_form_gap(const Scenario& scenario);

struct LocationFeasibility {
  int k = 0;
  double tail = 0.0;
  /// tail - beta.
  double slack = 0.0;
  bool feasible = false;
};

std::vector<LocationFeasibility> verify_soft_feasibility(const PolicyMatrix& policy,
                                                         const Scenario& scenario);

}  // namespace crowdsense
