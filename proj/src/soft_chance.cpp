#include "crowdsense/soft_chance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "crowdsense/parallel.hpp"
#include "crowdsense/random.hpp"
#include "crowdsense/tail_prob.hpp"

namespace crowdsense {

namespace {

constexpr double kBandTolerance = 1e-12;

std::vector<PaymentTerm> column_terms(const Scenario& s, std::size_t l) {
  std::vector<PaymentTerm> terms;
  terms.reserve(s.periods());
  for (std::size_t t = 0; t < s.periods(); ++t) terms.push_back({s.requirement(t, l), s.curve(t, l)});
  return terms;
}

void check_location(const Scenario& s, std::size_t l) {
  if (l >= s.locations()) {
    throw StructuralError("location " + std::to_string(l) + " out of range (L = " +
                          std::to_string(s.locations()) + ")");
  }
}

SolveOutcome solve_per_location(const Scenario& s, const std::vector<double>& gamma) {
  const std::size_t T = s.periods();
  const std::size_t L = s.locations();
  Matrix<double> rho(T, L, 0.0);
  SolveOutcome out;
  out.location_dual.resize(L);
  out.location_gamma = gamma;
  for (std::size_t l = 0; l < L; ++l) {
    const BudgetedSolution sol = solve_location_subproblem(s, l, gamma[l]);
    for (std::size_t t = 0; t < T; ++t) rho(t, l) = sol.rho[t];
    out.objective += sol.objective;
    out.location_dual[l] = sol.dual;
    out.diagnostics.iterations += sol.iterations;
    out.diagnostics.residual += sol.residual;
  }
  out.policy = PolicyMatrix(std::move(rho));
  return out;
}

bool in_band(double q, const BinarySearchParams& p) {
  return q >= p.sigma_lo - kBandTolerance && q <= p.sigma_hi + kBandTolerance;
}

std::string describe_trajectory(const std::vector<SearchStep>& steps) {
  std::string text;
  const std::size_t shown = std::min<std::size_t>(steps.size(), 8);
  for (std::size_t i = steps.size() - shown; i < steps.size(); ++i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " (gamma=%.9g, q=%.4f, N=%lld)", steps[i].gamma, steps[i].q,
                  static_cast<long long>(steps[i].samples));
    text += buf;
  }
  return text;
}

struct ColumnResult {
  LocationSearch search;
  std::vector<double> rho;
};

ColumnResult search_location(const Scenario& s, std::size_t l, const BinarySearchParams& p) {
  const SoftSpec& spec = s.spec().soft_spec();
  const double beta = spec.beta;
  const int T = static_cast<int>(s.periods());
  const int k = success_threshold(T, spec.alpha[l]);

  ColumnResult out;
  LocationSearch& res = out.search;
  res.k = k;
  std::int64_t samples = p.mc_samples;

  for (int esc = 0; esc <= p.max_escalations; ++esc) {
    double lo = 0.0;
    double hi = static_cast<double>(T);
    bool have_hi = false;
    double q_hi = 0.0;
    BudgetedSolution sol_hi;
    int iter = 0;
    for (;;) {
      if (have_hi && p.fresh_draws) {
        const auto seed = derive_seed(p.master_seed, {l, static_cast<std::uint64_t>(esc),
                                                      static_cast<std::uint64_t>(iter), 1});
        q_hi = monte_carlo_tail(sol_hi.rho, k, samples, seed).value - beta;
      }
      if (have_hi && in_band(q_hi, p)) {
        res.gamma_final = hi;
        res.q_estimate = q_hi;
        res.bisect_iters = iter;
        res.samples = samples;
        res.escalations = esc;
        res.dual = sol_hi.dual;
        res.exact_tail_check = exact_tail(sol_hi.rho, k);
        out.rho = std::move(sol_hi.rho);
        return out;
      }
      if (iter >= p.max_bisect || hi - lo < p.min_width) break;
      const double mid = 0.5 * (lo + hi);
      BudgetedSolution sol = solve_location_subproblem(s, l, mid);
      const auto seed = derive_seed(p.master_seed, {l, static_cast<std::uint64_t>(esc),
                                                    static_cast<std::uint64_t>(iter), 0});
      const double q = monte_carlo_tail(sol.rho, k, samples, seed).value - beta;
      res.trajectory.push_back({esc, iter, mid, q, samples});
      ++iter;
      if (q < (p.split_at_zero ? 0.0 : p.sigma_lo)) {
        lo = mid;
      } else {
        hi = mid;
        q_hi = q;
        sol_hi = std::move(sol);
        have_hi = true;
      }
    }
    if (esc < p.max_escalations) {
      if (samples > std::numeric_limits<std::int64_t>::max() / p.escalation_factor) break;
      samples *= p.escalation_factor;
    }
  }

  if (p.fall_back_to_full && in_band(1.0 - beta, p)) {
    BudgetedSolution full = solve_location_subproblem(s, l, static_cast<double>(T));
    res.gamma_final = static_cast<double>(T);
    res.q_estimate = 1.0 - beta;
    res.bisect_iters = 0;
    res.samples = samples;
    res.escalations = p.max_escalations;
    res.fell_back = true;
    res.dual = full.dual;
    res.exact_tail_check = exact_tail(full.rho, k);
    out.rho = std::move(full.rho);
    return out;
  }
  throw NonTerminationError(l, std::move(res.trajectory));
}

}  // namespace

NonTerminationError::NonTerminationError(std::size_t location, std::vector<SearchStep> trajectory)
    : Error("binary search at location " + std::to_string(location) +
            " did not reach the tolerance band after all escalations; last steps:" +
            describe_trajectory(trajectory)),
      location_(location),
      trajectory_(std::move(trajectory)) {}

BudgetedSolution solve_location_subproblem(const Scenario& scenario, std::size_t location,
                                           double gamma) {
  check_location(scenario, location);
  const double T = static_cast<double>(scenario.periods());
  if (gamma > T * (1.0 + 1e-12)) {
    throw InfeasibleError("location " + std::to_string(location) + " needs mass " +
                          std::to_string(gamma) + " but has only " +
                          std::to_string(scenario.periods()) + " slots");
  }
  BudgetedProblem problem{column_terms(scenario, location), std::min(gamma, T)};
  for (const auto& term : problem.terms) check_convexity(term);
  return solve_budgeted(problem);
}

SolveOutcome solve_relaxed_soft(const Scenario& scenario) {
  const SoftSpec& spec = scenario.spec().soft_spec();
  const double T = static_cast<double>(scenario.periods());
  std::vector<double> gamma;
  for (double a : spec.alpha) gamma.push_back(T * a * spec.beta);
  return solve_per_location(scenario, gamma);
}

SolveOutcome solve_conservative_soft(const Scenario& scenario) {
  const SoftSpec& spec = scenario.spec().soft_spec();
  const double T = static_cast<double>(scenario.periods());
  return solve_per_location(scenario,
                            std::vector<double>(scenario.locations(), T - 1.0 + spec.beta));
}

void validate_search_params(const BinarySearchParams& p, double beta) {
  if (!(p.sigma_lo > 0.0 && p.sigma_hi > p.sigma_lo)) {
    throw ConfigError("search tolerances need sigma_hi > sigma_lo > 0");
  }
  if (1.0 - beta < p.sigma_lo - kBandTolerance) {
    throw ConfigError("tolerance band unreachable: 1 - beta = " + std::to_string(1.0 - beta) +
                      " is below sigma_lo = " + std::to_string(p.sigma_lo));
  }
  if (p.mc_samples < 1) throw ConfigError("mc_samples must be >= 1");
  if (p.max_bisect < 1) throw ConfigError("max_bisect must be >= 1");
  if (p.escalation_factor < 1) throw ConfigError("escalation_factor must be >= 1");
  if (p.max_escalations < 0) throw ConfigError("max_escalations must be >= 0");
  if (!(p.min_width > 0.0)) throw ConfigError("min_width must be > 0");
}

SoftSolveOutcome binary_search_policy(const Scenario& scenario, const BinarySearchParams& params) {
  validate_search_params(params, scenario.spec().soft_spec().beta);
  const std::size_t L = scenario.locations();
  const std::size_t T = scenario.periods();
  std::vector<ColumnResult> columns(L);
  parallel_for(L, [&](std::size_t l) { columns[l] = search_location(scenario, l, params); });

  Matrix<double> rho(T, L, 0.0);
  SoftSolveOutcome out;
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t t = 0; t < T; ++t) rho(t, l) = columns[l].rho[t];
    out.per_location.push_back(std::move(columns[l].search));
  }
  out.policy = PolicyMatrix(std::move(rho));
  out.objective = total_payment(out.policy, scenario);
  return out;
}

GapCertificate certify_soft_gap(const Scenario& scenario) {
  const SoftSpec& spec = scenario.spec().soft_spec();
  const double T = static_cast<double>(scenario.periods());
  const SolveOutcome conservative = solve_conservative_soft(scenario);
  GapCertificate c;
  c.formula = GapFormula::ConservativeSoft;
  c.cells = static_cast<int>(scenario.cells());
  c.location_dual = conservative.location_dual;
  c.location_gamma = conservative.location_gamma;
  c.location_clamped.assign(scenario.locations(), false);
  for (std::size_t l = 0; l < scenario.locations(); ++l) {
    const double factor = T - T * spec.alpha[l] * spec.beta - 1.0 + spec.beta;
    c.location_bound.push_back(c.location_dual[l] * factor);
    c.bound += c.location_bound.back();
    c.dual += c.location_dual[l];
  }
  c.bound = std::max(0.0, c.bound);
  return c;
}

ClosedFormValue closed_form_acceptance(int periods, double alpha, double beta) {
  if (periods < 1) throw DomainError("number of slots must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0,1]");
  ClosedFormValue v;
  v.unclamped = alpha + inverse_normal_cdf(beta) * std::sqrt(alpha / periods);
  v.value = std::clamp(v.unclamped, 0.0, 1.0);
  v.clamped = v.value != v.unclamped;
  return v;
}

namespace {

void require_time_independent(const Scenario& s) {
  for (std::size_t l = 0; l < s.locations(); ++l) {
    if (!s.is_time_independent(l)) {
      throw StructuralError("closed form needs identical requirement and curve in every slot; "
                            "location " + std::to_string(l) + " varies over time");
    }
  }
}

}  // namespace

ClosedFormOutcome closed_form_policy(const Scenario& scenario) {
  require_time_independent(scenario);
  const SoftSpec& spec = scenario.spec().soft_spec();
  const int T = static_cast<int>(scenario.periods());
  Matrix<double> rho(scenario.periods(), scenario.locations(), 0.0);
  ClosedFormOutcome out;
  for (std::size_t l = 0; l < scenario.locations(); ++l) {
    const ClosedFormValue v = closed_form_acceptance(T, spec.alpha[l], spec.beta);
    for (std::size_t t = 0; t < scenario.periods(); ++t) rho(t, l) = v.value;
    out.per_location.push_back(v);
  }
  out.policy = PolicyMatrix(std::move(rho));
  out.objective = total_payment(out.policy, scenario);
  return out;
}

GapCertificate certify_closed_form_gap(const Scenario& scenario) {
  require_time_independent(scenario);
  const SoftSpec& spec = scenario.spec().soft_spec();
  const int T = static_cast<int>(scenario.periods());
  const double x = inverse_normal_cdf(spec.beta);
  GapCertificate c;
  c.formula = GapFormula::ClosedFormSoft;
  c.cells = static_cast<int>(scenario.cells());
  for (std::size_t l = 0; l < scenario.locations(); ++l) {
    const double mean = T * spec.alpha[l];
    const double raw = mean + x * std::sqrt(mean);
    const double gamma = std::clamp(raw, 0.0, static_cast<double>(T));
    const PaymentTerm term{scenario.requirement(0, l), scenario.curve(0, l)};
    const double dual = solve_budgeted_scalar(term, gamma, T).dual;
    c.location_gamma.push_back(gamma);
    c.location_clamped.push_back(gamma != raw);
    c.location_dual.push_back(dual);
    c.location_bound.push_back(dual * (gamma - mean * spec.beta));
    c.bound += c.location_bound.back();
    c.dual += dual;
  }
  c.bound = std::max(0.0, c.bound);
  return c;
}

std::vector<LocationFeasibility> verify_soft_feasibility(const PolicyMatrix& policy,
                                                         const Scenario& scenario) {
  check_same_shape(policy, scenario);
  const SoftSpec& spec = scenario.spec().soft_spec();
  const int T = static_cast<int>(scenario.periods());
  std::vector<LocationFeasibility> out;
  for (std::size_t l = 0; l < scenario.locations(); ++l) {
    LocationFeasibility f;
    f.k = success_threshold(T, spec.alpha[l]);
    f.tail = exact_tail(policy.column(l), f.k);
    f.slack = f.tail - spec.beta;
    f.feasible = f.slack >= 0.0;
    out.push_back(f);
  }
  return out;
}

}  // namespace crowdsense
