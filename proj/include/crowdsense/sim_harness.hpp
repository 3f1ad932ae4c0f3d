#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "crowdsense/core_model.hpp"
#include "crowdsense/soft_chance.hpp"

namespace crowdsense {

struct AlphaSetting {
  double low = 0.9;
  double high = 1.0;
};

struct ExperimentConfig {
  int periods = 70;
  int locations = 6;
  /// Per-location requirement interval; empty vectors mean [1, l^2] with l
  /// the 1-based location index.
  std::vector<int> r_low;
  std::vector<int> r_high;
  /// Per-location power-law curve; empty vectors mean scale l, exponent 3.
  std::vector<double> curve_scale;
  std::vector<double> curve_exponent;
  std::vector<double> epsilon_grid{0.08, 0.06, 0.04, 0.02, 0.0};
  std::vector<double> beta_grid{0.91, 0.93, 0.95, 0.97, 0.99};
  std::vector<AlphaSetting> alpha_settings{{0.9, 1.0}, {0.75, 1.0}};
  int replications = 20;
  std::uint64_t master_seed = 20240501;
  BinarySearchParams search = default_search();

  static BinarySearchParams default_search() {
    BinarySearchParams p;
    p.fall_back_to_full = true;
    return p;
  }

  int requirement_low(std::size_t location) const;
  int requirement_high(std::size_t location) const;
  double scale(std::size_t location) const;
  double exponent(std::size_t location) const;
};

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

/// Scenario of one replication: r[t][l] drawn uniformly from the location's
/// interval on the replication's substream (row-major order).
Scenario generate_scenario(const ExperimentConfig& config, int replication,
                           RobustnessSpec spec = RobustnessSpec::hard(0.0));

/// Per-location alpha drawn uniformly from the setting's interval.
std::vector<double> draw_alpha(const ExperimentConfig& config, std::size_t setting,
                               int replication);

PolicyMatrix policy_our(const Scenario& scenario, const BinarySearchParams& params);
PolicyMatrix policy_lower_bound(const Scenario& scenario);
/// Constant 1 - eps (hard) or beta (soft).
PolicyMatrix policy_uniform(const Scenario& scenario);
/// Every entry uniform on [0,1].
PolicyMatrix policy_random(const Scenario& scenario, std::uint64_t seed);

struct NamedPolicy {
  std::string name;
  PolicyMatrix policy;
};

struct ComparisonRow {
  std::string policy_name;
  double total_payment = 0.0;
  /// (payment - lower-bound payment) / T.
  double time_avg_gap = 0.0;
  /// Hard scenarios: product of all entries.
  double hard_success_prob = 0.0;
  /// Soft scenarios: exact tail - beta per location.
  std::vector<double> soft_slack;
};

inline constexpr const char* kLowerBoundName = "lower_bound";

/// One row per policy, in input order. A policy named "lower_bound" must be
/// present.
std::vector<ComparisonRow> evaluate(const Scenario& scenario,
                                    const std::vector<NamedPolicy>& policies);

struct Table1Row {
  double one_minus_epsilon = 0.0;
  double our = 0.0;
  double lower_bound = 0.0;
  double uniform = 0.0;
  double random = 0.0;
};

/// Joint success probabilities averaged over replications, one row per
/// epsilon in grid order.
std::vector<Table1Row> run_table1(const ExperimentConfig& config);

struct GapRow {
  double requirement = 0.0;
  std::string policy;
  double mean_gap = 0.0;
  double stderr_gap = 0.0;
  bool operator==(const GapRow&) const = default;
};

/// Time-average gap of our/uniform/random against the lower bound for each
/// 1 - eps.
std::vector<GapRow> run_hard_gap_sweep(const ExperimentConfig& config);

/// Same for each beta under one alpha setting.
std::vector<GapRow> run_soft_gap_sweep(const ExperimentConfig& config, std::size_t setting);

/// "%.6f", or "%.6e" for 0 < |x| < 1e-4.
std::string format_number(double x);

void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows);
void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows);

}  // namespace crowdsense
