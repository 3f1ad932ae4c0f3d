#include "crowdsense/sim_harness.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "crowdsense/hard_chance.hpp"
#include "crowdsense/parallel.hpp"
#include "crowdsense/random.hpp"
#include "crowdsense/tail_prob.hpp"

namespace crowdsense {

namespace {

// Substream tags under the master seed.
constexpr std::uint64_t kRequirementStream = 1;
constexpr std::uint64_t kAlphaStream = 2;
constexpr std::uint64_t kHardRandomStream = 3;
constexpr std::uint64_t kSoftRandomStream = 4;
constexpr std::uint64_t kSearchStream = 5;

template <typename T>
void check_per_location(const std::vector<T>& v, int locations, const char* field) {
  if (!v.empty() && static_cast<int>(v.size()) != locations) {
    throw ConfigError(std::string(field) + ": expected " + std::to_string(locations) +
                      " entries, got " + std::to_string(v.size()));
  }
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

const char* const kSweepPolicies[] = {"our", "uniform", "random"};

// gaps[job][p] for the three sweep policies; jobs are (requirement, replication).
std::vector<GapRow> summarize(const std::vector<double>& requirement, int replications,
                              const std::vector<std::vector<double>>& gaps) {
  std::vector<GapRow> rows;
  for (std::size_t g = 0; g < requirement.size(); ++g) {
    for (std::size_t p = 0; p < 3; ++p) {
      std::vector<double> sample;
      for (int rep = 0; rep < replications; ++rep) {
        sample.push_back(gaps[g * static_cast<std::size_t>(replications) + rep][p]);
      }
      rows.push_back({requirement[g], kSweepPolicies[p], mean_of(sample), stderr_of(sample)});
    }
  }
  return rows;
}

std::vector<double> sweep_gaps(const Scenario& scenario, const BinarySearchParams& params,
                               std::uint64_t random_seed) {
  const auto rows = evaluate(scenario, {{kLowerBoundName, policy_lower_bound(scenario)},
                                        {"our", policy_our(scenario, params)},
                                        {"uniform", policy_uniform(scenario)},
                                        {"random", policy_random(scenario, random_seed)}});
  return {rows[1].time_avg_gap, rows[2].time_avg_gap, rows[3].time_avg_gap};
}

}  // namespace

int ExperimentConfig::requirement_low(std::size_t l) const { return r_low.empty() ? 1 : r_low[l]; }

int ExperimentConfig::requirement_high(std::size_t l) const {
  return r_high.empty() ? static_cast<int>((l + 1) * (l + 1)) : r_high[l];
}

double ExperimentConfig::scale(std::size_t l) const {
  return curve_scale.empty() ? static_cast<double>(l + 1) : curve_scale[l];
}

double ExperimentConfig::exponent(std::size_t l) const {
  return curve_exponent.empty() ? 3.0 : curve_exponent[l];
}

void validate(const ExperimentConfig& c) {
  if (c.periods < 1) throw ConfigError("T: must be >= 1");
  if (c.locations < 1) throw ConfigError("L: must be >= 1");
  if (c.replications < 1) throw ConfigError("replications: must be >= 1");
  check_per_location(c.r_low, c.locations, "requirement.low");
  check_per_location(c.r_high, c.locations, "requirement.high");
  check_per_location(c.curve_scale, c.locations, "curves.scale");
  check_per_location(c.curve_exponent, c.locations, "curves.exponent");
  for (std::size_t l = 0; l < static_cast<std::size_t>(c.locations); ++l) {
    if (c.requirement_low(l) < 1 || c.requirement_high(l) < c.requirement_low(l)) {
      throw ConfigError("requirement[" + std::to_string(l) + "]: need 1 <= low <= high");
    }
  }
  for (double e : c.epsilon_grid) {
    if (!(e >= 0.0 && e < 1.0)) throw ConfigError("epsilon_grid: entries must lie in [0,1)");
  }
  for (double b : c.beta_grid) {
    if (!(b > 0.0 && b < 1.0)) throw ConfigError("beta_grid: entries must lie in (0,1)");
    validate_search_params(c.search, b);
  }
  for (const auto& a : c.alpha_settings) {
    if (!(a.low > 0.0 && a.low <= a.high && a.high <= 1.0)) {
      throw ConfigError("alpha_settings: need 0 < low <= high <= 1");
    }
  }
}

Scenario generate_scenario(const ExperimentConfig& config, int replication, RobustnessSpec spec) {
  const auto T = static_cast<std::size_t>(config.periods);
  const auto L = static_cast<std::size_t>(config.locations);
  Xoshiro256 rng(derive_seed(config.master_seed,
                             {kRequirementStream, static_cast<std::uint64_t>(replication)}));
  Matrix<int> r(T, L, 1);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t l = 0; l < L; ++l) {
      r(t, l) = static_cast<int>(
          rng.uniform_int(config.requirement_low(l), config.requirement_high(l)));
    }
  }
  Matrix<BiddingCurve> curves(T, L, BiddingCurve{});
  for (std::size_t l = 0; l < L; ++l) {
    const auto curve = BiddingCurve::power(config.scale(l), config.exponent(l));
    for (std::size_t t = 0; t < T; ++t) curves(t, l) = curve;
  }
  return Scenario(std::move(r), std::move(curves), std::move(spec));
}

std::vector<double> draw_alpha(const ExperimentConfig& config, std::size_t setting,
                               int replication) {
  const AlphaSetting& a = config.alpha_settings.at(setting);
  Xoshiro256 rng(derive_seed(config.master_seed,
                             {kAlphaStream, setting, static_cast<std::uint64_t>(replication)}));
  std::vector<double> alpha;
  for (int l = 0; l < config.locations; ++l) alpha.push_back(a.low + (a.high - a.low) * rng.uniform());
  return alpha;
}

PolicyMatrix policy_our(const Scenario& scenario, const BinarySearchParams& params) {
  if (scenario.spec().is_hard()) return solve_conservative_hard(scenario).policy;
  return binary_search_policy(scenario, params).policy;
}

PolicyMatrix policy_lower_bound(const Scenario& scenario) {
  if (scenario.spec().is_hard()) return solve_relaxed_hard(scenario).policy;
  return solve_relaxed_soft(scenario).policy;
}

PolicyMatrix policy_uniform(const Scenario& scenario) {
  const double level = scenario.spec().is_hard() ? 1.0 - scenario.spec().hard_spec().epsilon
                                                 : scenario.spec().soft_spec().beta;
  return PolicyMatrix::constant(scenario.periods(), scenario.locations(), level);
}

PolicyMatrix policy_random(const Scenario& scenario, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  Matrix<double> rho(scenario.periods(), scenario.locations(), 0.0);
  for (double& x : rho.flat()) x = rng.uniform();
  return PolicyMatrix(std::move(rho));
}

std::vector<ComparisonRow> evaluate(const Scenario& scenario,
                                    const std::vector<NamedPolicy>& policies) {
  const NamedPolicy* lower = nullptr;
  for (const auto& p : policies) {
    if (p.name == kLowerBoundName) lower = &p;
  }
  if (lower == nullptr) throw StructuralError("evaluate needs a policy named lower_bound");
  const double base = total_payment(lower->policy, scenario);
  const double T = static_cast<double>(scenario.periods());

  std::vector<ComparisonRow> rows;
  for (const auto& p : policies) {
    ComparisonRow row;
    row.policy_name = p.name;
    row.total_payment = total_payment(p.policy, scenario);
    row.time_avg_gap = &p == lower ? 0.0 : (row.total_payment - base) / T;
    if (scenario.spec().is_hard()) {
      row.hard_success_prob = joint_success_probability(p.policy);
    } else {
      for (const auto& f : verify_soft_feasibility(p.policy, scenario)) row.soft_slack.push_back(f.slack);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Table1Row> run_table1(const ExperimentConfig& config) {
  validate(config);
  const std::size_t E = config.epsilon_grid.size();
  const auto R = static_cast<std::size_t>(config.replications);
  std::vector<std::vector<double>> prob(E * R);
  parallel_for(E * R, [&](std::size_t job) {
    const std::size_t e = job / R;
    const std::size_t rep = job % R;
    const double eps = config.epsilon_grid[e];
    const Scenario s = generate_scenario(config, static_cast<int>(rep), RobustnessSpec::hard(eps));
    const auto seed = derive_seed(config.master_seed, {kHardRandomStream, rep, e});
    const auto rows = evaluate(s, {{kLowerBoundName, policy_lower_bound(s)},
                                   {"our", policy_our(s, config.search)},
                                   {"uniform", policy_uniform(s)},
                                   {"random", policy_random(s, seed)}});
    prob[job] = {rows[1].hard_success_prob, rows[0].hard_success_prob, rows[2].hard_success_prob,
                 rows[3].hard_success_prob};
  });
  std::vector<Table1Row> table;
  for (std::size_t e = 0; e < E; ++e) {
    double sum[4] = {0, 0, 0, 0};
    for (std::size_t rep = 0; rep < R; ++rep) {
      for (int c = 0; c < 4; ++c) sum[c] += prob[e * R + rep][c];
    }
    const double n = static_cast<double>(R);
    table.push_back({1.0 - config.epsilon_grid[e], sum[0] / n, sum[1] / n, sum[2] / n, sum[3] / n});
  }
  return table;
}

std::vector<GapRow> run_hard_gap_sweep(const ExperimentConfig& config) {
  validate(config);
  const std::size_t E = config.epsilon_grid.size();
  const auto R = static_cast<std::size_t>(config.replications);
  std::vector<std::vector<double>> gaps(E * R);
  parallel_for(E * R, [&](std::size_t job) {
    const std::size_t e = job / R;
    const std::size_t rep = job % R;
    const Scenario s = generate_scenario(config, static_cast<int>(rep),
                                         RobustnessSpec::hard(config.epsilon_grid[e]));
    gaps[job] = sweep_gaps(s, config.search,
                           derive_seed(config.master_seed, {kHardRandomStream, rep, e}));
  });
  std::vector<double> requirement;
  for (double eps : config.epsilon_grid) requirement.push_back(1.0 - eps);
  return summarize(requirement, config.replications, gaps);
}

std::vector<GapRow> run_soft_gap_sweep(const ExperimentConfig& config, std::size_t setting) {
  validate(config);
  if (setting >= config.alpha_settings.size()) throw ConfigError("alpha setting index out of range");
  const std::size_t B = config.beta_grid.size();
  const auto R = static_cast<std::size_t>(config.replications);
  std::vector<std::vector<double>> gaps(B * R);
  parallel_for(B * R, [&](std::size_t job) {
    const std::size_t b = job / R;
    const std::size_t rep = job % R;
    const auto spec = RobustnessSpec::soft(draw_alpha(config, setting, static_cast<int>(rep)),
                                           config.beta_grid[b]);
    const Scenario s = generate_scenario(config, static_cast<int>(rep), spec);
    BinarySearchParams params = config.search;
    params.master_seed = derive_seed(config.master_seed, {kSearchStream, setting, rep, b});
    gaps[job] = sweep_gaps(s, params,
                           derive_seed(config.master_seed, {kSoftRandomStream, setting, rep, b}));
  });
  return summarize(config.beta_grid, config.replications, gaps);
}

std::string format_number(double x) {
  char buf[64];
  const double a = std::fabs(x);
  std::snprintf(buf, sizeof buf, (a > 0.0 && a < 1e-4) ? "%.6e" : "%.6f", x);
  return buf;
}

void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows) {
  out << "one_minus_epsilon,our,lower_bound,uniform,random\n";
  for (const auto& r : rows) {
    out << format_number(r.one_minus_epsilon) << ',' << format_number(r.our) << ','
        << format_number(r.lower_bound) << ',' << format_number(r.uniform) << ','
        << format_number(r.random) << '\n';
  }
}

void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows) {
  out << "requirement,policy,mean_gap,stderr\n";
  for (const auto& r : rows) {
    out << format_number(r.requirement) << ',' << r.policy << ',' << format_number(r.mean_gap)
        << ',' << format_number(r.stderr_gap) << '\n';
  }
}

}  // namespace crowdsense
