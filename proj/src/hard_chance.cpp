#include "crowdsense/hard_chance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "crowdsense/separable_solver.hpp"

namespace crowdsense {

const char* to_string(GapFormula formula) {
  switch (formula) {
    case GapFormula::Pairwise: return "pairwise";
    case GapFormula::Relaxation: return "relaxation";
    case GapFormula::Tightest: return "tightest";
    case GapFormula::ConservativeSoft: return "conservative_soft";
    case GapFormula::ClosedFormSoft: return "closed_form_soft";
  }
  return "unknown";
}

namespace {

std::vector<PaymentTerm> all_terms(const Scenario& s) {
  std::vector<PaymentTerm> terms;
  terms.reserve(s.cells());
  for (std::size_t t = 0; t < s.periods(); ++t) {
    for (std::size_t l = 0; l < s.locations(); ++l) {
      terms.push_back({s.requirement(t, l), s.curve(t, l)});
    }
  }
  return terms;
}

SolveOutcome solve_with_mass(const Scenario& s, double gamma) {
  BudgetedProblem problem{all_terms(s), gamma};
  for (const auto& term : problem.terms) check_convexity(term);
  BudgetedSolution sol = solve_budgeted(problem);
  SolveOutcome out;
  out.policy = PolicyMatrix(Matrix<double>(s.periods(), s.locations(), std::move(sol.rho)));
  out.objective = sol.objective;
  out.dual = sol.dual;
  out.diagnostics.iterations = sol.iterations;
  out.diagnostics.residual = sol.residual;
  out.diagnostics.gamma = gamma;
  return out;
}

bool all_cells_identical(const Scenario& s) {
  for (std::size_t t = 0; t < s.periods(); ++t) {
    for (std::size_t l = 0; l < s.locations(); ++l) {
      if (s.requirement(t, l) != s.requirement(0, 0) || !(s.curve(t, l) == s.curve(0, 0))) {
        return false;
      }
    }
  }
  return true;
}

struct GridSearch {
  const std::vector<PaymentTerm>& terms;
  const std::vector<std::vector<double>>& payment;  // payment[i][j] = f_i(grid[j])
  const std::vector<double>& grid;
  double target;
  std::vector<std::size_t> index;
  std::vector<std::size_t> best_index;
  double best_last = 1.0;
  double best = std::numeric_limits<double>::infinity();

  void run(std::size_t depth, double product, double partial) {
    const std::size_t last = terms.size() - 1;
    if (depth == last) {
      const double x = std::min(1.0, target / product);
      const double total = partial + terms[last].value(x);
      if (total < best) {
        best = total;
        best_index = index;
        best_last = x;
      }
      return;
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double p = product * grid[j];
      if (p < target) break;  // grid descends, so the product only shrinks
      index[depth] = j;
      run(depth + 1, p, partial + payment[depth][j]);
    }
  }
};

}  // namespace

SolveOutcome solve_conservative_hard(const Scenario& scenario) {
  const double eps = scenario.spec().hard_spec().epsilon;
  return solve_with_mass(scenario, static_cast<double>(scenario.cells()) - eps);
}

SolveOutcome solve_relaxed_hard(const Scenario& scenario) {
  const double eps = scenario.spec().hard_spec().epsilon;
  const double cells = static_cast<double>(scenario.cells());
  return solve_with_mass(scenario, cells * (1.0 - eps));
}

HardFeasibility verify_hard_feasibility(const PolicyMatrix& policy, double epsilon) {
  const double slack = joint_success_probability(policy) - (1.0 - epsilon);
  return {slack >= 0.0, slack};
}

GapCertificate certify_hard_gap(const SolveOutcome& conservative, const Scenario& scenario) {
  const double eps = scenario.spec().hard_spec().epsilon;
  const double n = static_cast<double>(scenario.cells());
  GapCertificate c;
  c.formula = GapFormula::Tightest;
  c.dual = conservative.dual;
  c.epsilon = eps;
  c.cells = static_cast<int>(scenario.cells());
  c.pairwise_bound = c.dual * n * (n - 1.0) / 2.0 * eps * eps;
  c.relaxation_bound = c.dual * (n - 1.0) * eps;
  c.bound = std::max(0.0, std::min(c.pairwise_bound, c.relaxation_bound));
  return c;
}

SolveOutcome brute_force_hard(const Scenario& scenario, double step) {
  const std::size_t n = scenario.cells();
  if (n > static_cast<std::size_t>(kBruteForceMaxCells)) {
    throw DomainError("grid oracle supports at most " + std::to_string(kBruteForceMaxCells) +
                      " cells, scenario has " + std::to_string(n));
  }
  if (!(step > 0.0 && step <= kBruteForceMaxStep)) {
    throw DomainError("grid step must lie in (0, " + std::to_string(kBruteForceMaxStep) + "]");
  }
  const double eps = scenario.spec().hard_spec().epsilon;
  const double target = 1.0 - eps;
  const auto terms = all_terms(scenario);

  SolveOutcome out;
  std::vector<double> rho(n);
  if (all_cells_identical(scenario)) {
    std::fill(rho.begin(), rho.end(), std::pow(target, 1.0 / static_cast<double>(n)));
  } else {
    std::vector<double> grid;
    for (std::size_t j = 0;; ++j) {
      const double v = 1.0 - static_cast<double>(j) * step;
      if (v < target) break;
      grid.push_back(v);
    }
    std::vector<std::vector<double>> payment(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (double v : grid) payment[i].push_back(terms[i].value(v));
    }
    GridSearch search{terms, payment, grid, target, std::vector<std::size_t>(n - 1, 0), {}, 1.0};
    search.run(0, 1.0, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) rho[i] = grid[search.best_index[i]];
    rho[n - 1] = search.best_last;
    for (std::size_t i = 0; i + 1 < n; ++i) out.diagnostics.grid_slack += step * terms[i].marginal(1.0);
  }
  double objective = 0.0;
  for (std::size_t i = 0; i < n; ++i) objective += terms[i].value(rho[i]);
  out.policy = PolicyMatrix(Matrix<double>(scenario.periods(), scenario.locations(), rho));
  out.objective = objective;
  return out;
}

}  // namespace crowdsense
