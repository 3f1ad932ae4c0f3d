#include "crowdsense/separable_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crowdsense {

namespace {

constexpr int kConvexitySamples = 64;
constexpr int kInverseIterations = 200;

double mass_at(const std::vector<PaymentTerm>& terms, double nu, std::vector<double>& rho) {
  double sum = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    rho[i] = terms[i].inverse_marginal(nu);
    sum += rho[i];
  }
  return sum;
}

double objective_of(const std::vector<PaymentTerm>& terms, const std::vector<double>& rho) {
  double sum = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) sum += terms[i].value(rho[i]);
  return sum;
}

BudgetedSolution boundary(const std::vector<PaymentTerm>& terms, double gamma, double level) {
  BudgetedSolution s;
  s.rho.assign(terms.size(), level);
  s.objective = objective_of(terms, s.rho);
  if (level == 1.0) {
    for (const auto& t : terms) s.dual = std::max(s.dual, t.marginal(1.0));
  }
  s.residual = static_cast<double>(terms.size()) * level - gamma;
  return s;
}

}  // namespace

double PaymentTerm::value(double rho) const {
  return expected_cell_payment(rho, requirement, curve);
}

double PaymentTerm::marginal(double rho) const {
  return requirement * (curve.bid(rho) + rho * curve.derivative(rho));
}

double PaymentTerm::inverse_marginal(double nu) const {
  if (curve.is_power_law()) {
    // f(rho) = r c rho^(p+1)  =>  f'(rho) = r c (p+1) rho^p.
    const double p = curve.exponent();
    const double k = requirement * curve.scale() * (p + 1.0);
    if (nu <= 0.0) return 0.0;
    if (nu >= k) return 1.0;
    return std::pow(nu / k, 1.0 / p);
  }
  if (nu <= marginal(0.0)) return 0.0;
  if (nu >= marginal(1.0)) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < kInverseIterations && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (marginal(mid) < nu ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void check_convexity(const PaymentTerm& term) {
  if (term.requirement < 1) {
    throw ContractViolation("payment term requirement must be >= 1, got " +
                            std::to_string(term.requirement));
  }
  if (term.curve.is_power_law()) return;
  double previous = term.marginal(0.0);
  if (!(previous >= 0.0)) throw ContractViolation("payment integrand has negative marginal at 0");
  for (int i = 1; i <= kConvexitySamples; ++i) {
    const double rho = static_cast<double>(i) / kConvexitySamples;
    const double m = term.marginal(rho);
    if (!(m > previous)) {
      throw ContractViolation("payment integrand is not strictly convex: f' does not increase at rho=" +
                              std::to_string(rho));
    }
    previous = m;
  }
}

BudgetedSolution solve_budgeted(const BudgetedProblem& problem, double tol) {
  const auto& terms = problem.terms;
  if (terms.empty()) throw StructuralError("budgeted problem needs at least one term");
  if (!(tol > 0.0)) throw DomainError("mass tolerance must be positive");
  for (const auto& t : terms) check_convexity(t);

  const double n = static_cast<double>(terms.size());
  const double gamma = problem.gamma;
  if (!std::isfinite(gamma)) throw DomainError("gamma must be finite");
  if (gamma > n * (1.0 + 1e-12)) {
    throw InfeasibleError("required mass " + std::to_string(gamma) + " exceeds the " +
                          std::to_string(terms.size()) + " available cells");
  }
  if (gamma <= 0.0) return boundary(terms, gamma, 0.0);
  if (gamma >= n) return boundary(terms, gamma, 1.0);

  // sum_i clamp(f_i'^{-1}(nu)) is continuous and nondecreasing in nu, so the
  // bracket [min f'(0), max f'(1)] always contains the root.
  double lo = terms.front().marginal(0.0);
  double hi = terms.front().marginal(1.0);
  for (const auto& t : terms) {
    lo = std::min(lo, t.marginal(0.0));
    hi = std::max(hi, t.marginal(1.0));
  }

  std::vector<double> rho(terms.size());
  BudgetedSolution s;
  for (s.iterations = 1; s.iterations <= kMaxBisectionIterations; ++s.iterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double mass = mass_at(terms, mid, rho);
    if (mass < gamma) {
      lo = mid;
    } else {
      hi = mid;
      if (mass - gamma <= tol) break;
    }
  }
  s.iterations = std::min(s.iterations, kMaxBisectionIterations);
  s.rho.resize(terms.size());
  const double mass = mass_at(terms, hi, s.rho);
  s.dual = hi;
  s.residual = mass - gamma;
  s.objective = objective_of(terms, s.rho);
  return s;
}

BudgetedSolution solve_budgeted_scalar(const PaymentTerm& term, double gamma, int n, double tol) {
  if (n < 1) throw StructuralError("scalar budgeted problem needs n >= 1");
  if (!(tol > 0.0)) throw DomainError("mass tolerance must be positive");
  check_convexity(term);
  if (!(gamma >= 0.0) || gamma > n * (1.0 + 1e-12)) {
    throw InfeasibleError("required mass " + std::to_string(gamma) + " outside [0, " +
                          std::to_string(n) + "]");
  }
  const double level = std::clamp(gamma / n, 0.0, 1.0);
  BudgetedSolution s;
  s.rho.assign(static_cast<std::size_t>(n), level);
  s.objective = n * term.value(level);
  s.dual = level == 0.0 ? 0.0 : term.marginal(level);
  s.residual = n * level - gamma;
  return s;
}

}  // namespace crowdsense
