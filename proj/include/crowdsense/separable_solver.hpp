#pragma once

#include <vector>

#include "crowdsense/core_model.hpp"

namespace crowdsense {

/// Payment integrand f(rho) = rho * r * b(rho) of a single cell.
struct PaymentTerm {
  int requirement = 1;
  BiddingCurve curve;

  double value(double rho) const;
  /// f'(rho) = r * (b(rho) + rho * b'(rho)).
  double marginal(double rho) const;
  /// The rho in [0,1] whose marginal equals nu, clamped to the box. Closed
  /// form for power-law curves, bisection otherwise.
  double inverse_marginal(double nu) const;
};

/// Throws ContractViolation unless f' is positive and strictly increasing on
/// (0,1]. Power-law curves pass by construction; custom curves are sampled.
void check_convexity(const PaymentTerm& term);

/// minimize sum_i f_i(rho_i)  s.t.  sum_i rho_i >= gamma,  rho_i in [0,1].
struct BudgetedProblem {
  std::vector<PaymentTerm> terms;
  double gamma = 0.0;
};

struct BudgetedSolution {
  std::vector<double> rho;
  double objective = 0.0;
  /// Common marginal value at the optimum (the multiplier of the mass
  /// constraint). For gamma >= n this is max_i f_i'(1), the smallest valid
  /// multiplier; for gamma <= 0 it is 0.
  double dual = 0.0;
  /// sum(rho) - gamma; nonnegative whenever the constraint is satisfiable.
  double residual = 0.0;
  int iterations = 0;
};

inline constexpr double kDefaultMassTolerance = 1e-10;
inline constexpr int kMaxBisectionIterations = 200;

/// Equal-marginal water-filling: bisect on the common marginal nu so that
/// sum_i clamp(f_i'^{-1}(nu)) meets gamma. The returned point always
/// satisfies sum(rho) >= gamma with sum(rho) - gamma <= tol.
BudgetedSolution solve_budgeted(const BudgetedProblem& problem,
                                double tol = kDefaultMassTolerance);

/// n identical terms: the optimum is the constant vector gamma / n.
BudgetedSolution solve_budgeted_scalar(const PaymentTerm& term, double gamma, int n,
                                       double tol = kDefaultMassTolerance);

}  // namespace crowdsense
