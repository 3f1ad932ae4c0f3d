#include "crowdsense/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <ostream>

#include "crowdsense/hard_chance.hpp"
#include "crowdsense/scenario_io.hpp"
#include "crowdsense/sim_harness.hpp"
#include "crowdsense/soft_chance.hpp"

namespace crowdsense {

namespace {

namespace fs = std::filesystem;

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path.string() + ": cannot write output file");
  f << text;
  if (!f) throw ConfigError(path.string() + ": write failed");
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

template <typename Writer, typename Rows>
void write_csv(const fs::path& path, Writer writer, const Rows& rows) {
  std::ostringstream s;
  writer(s, rows);
  write_text(path, s.str());
}

Json load_config(const CliInvocation& inv) {
  if (inv.config_path.empty()) throw ConfigError("--config: required for " + inv.subcommand);
  return read_json_file(inv.config_path);
}

BinarySearchParams search_params(const Json& j, const CliInvocation& inv) {
  BinarySearchParams p = parse_search_params(j, BinarySearchParams{});
  if (inv.seed) p.master_seed = *inv.seed;
  if (inv.mc_samples) p.mc_samples = *inv.mc_samples;
  return p;
}

Json shape(const Scenario& s) { return {{"T", s.periods()}, {"L", s.locations()}}; }

void print_policy_summary(std::ostream& out, const PolicyMatrix& policy) {
  out << "location  min_rho     mean_rho    max_rho\n";
  for (std::size_t l = 0; l < policy.locations(); ++l) {
    const auto col = policy.column(l);
    double sum = 0.0;
    for (double x : col) sum += x;
    char line[96];
    std::snprintf(line, sizeof line, "%-8zu  %-10.6f  %-10.6f  %-10.6f\n", l,
                  *std::min_element(col.begin(), col.end()), sum / static_cast<double>(col.size()),
                  *std::max_element(col.begin(), col.end()));
    out << line;
  }
}

int solve_hard(const CliInvocation& inv, std::ostream& out) {
  const Json j = load_config(inv);
  const Scenario s = parse_scenario(j);
  if (!s.spec().is_hard()) throw ConfigError("spec.type: solve-hard needs a hard spec");
  const double eps = s.spec().hard_spec().epsilon;
  const SolveOutcome ours = solve_conservative_hard(s);
  const SolveOutcome lower = solve_relaxed_hard(s);
  const HardFeasibility feas = verify_hard_feasibility(ours.policy, eps);
  const GapCertificate cert = certify_hard_gap(ours, s);

  Json r = {{"subcommand", "solve-hard"}};
  r.update(shape(s));
  r["epsilon"] = eps;
  r["policy"] = to_json(ours.policy);
  r["bids"] = to_json(ours.policy.bids(s));
  r["objective"] = ours.objective;
  r["lambda"] = ours.dual;
  r["certificate"] = to_json(cert);
  r["feasibility"] = {{"feasible", feas.feasible},
                      {"slack", feas.slack},
                      {"joint_success_probability", joint_success_probability(ours.policy)}};
  r["lower_bound"] = {{"objective", lower.objective},
                      {"joint_success_probability", joint_success_probability(lower.policy)}};
  r["diagnostics"] = {{"iterations", ours.diagnostics.iterations},
                      {"residual", ours.diagnostics.residual},
                      {"gamma", ours.diagnostics.gamma}};
  write_json(fs::path(inv.output_dir) / "solve_hard.json", r);

  out << "hard chance constraint, T=" << s.periods() << " L=" << s.locations()
      << " epsilon=" << fmt("%g", eps) << "\n";
  out << "  payment            " << fmt("%.6f", ours.objective) << "\n";
  out << "  lower bound        " << fmt("%.6f", lower.objective) << "\n";
  out << "  lambda             " << fmt("%.6f", ours.dual) << "\n";
  out << "  gap bound          " << fmt("%.6f", cert.bound) << "\n";
  out << "  success prob       " << fmt("%.6f", joint_success_probability(ours.policy))
      << (feas.feasible ? "  (feasible)" : "  (INFEASIBLE)") << "\n";
  if (inv.verbose) print_policy_summary(out, ours.policy);
  return kExitOk;
}

Json feasibility_json(const std::vector<LocationFeasibility>& feas) {
  Json a = Json::array();
  for (const auto& f : feas) {
    a.push_back({{"k", f.k}, {"tail", f.tail}, {"slack", f.slack}, {"feasible", f.feasible}});
  }
  return a;
}

int solve_soft(const CliInvocation& inv, std::ostream& out) {
  const Json j = load_config(inv);
  const Scenario s = parse_scenario(j);
  if (!s.spec().is_soft()) throw ConfigError("spec.type: solve-soft needs a soft spec");
  const BinarySearchParams params = search_params(j, inv);
  const SoftSolveOutcome ours = binary_search_policy(s, params);
  const SolveOutcome lower = solve_relaxed_soft(s);
  const SolveOutcome conservative = solve_conservative_soft(s);
  const GapCertificate cert = certify_soft_gap(s);
  const auto feas = verify_soft_feasibility(ours.policy, s);

  Json r = {{"subcommand", "solve-soft"}};
  r.update(shape(s));
  r["beta"] = s.spec().soft_spec().beta;
  r["alpha"] = s.spec().soft_spec().alpha;
  r["policy"] = to_json(ours.policy);
  r["bids"] = to_json(ours.policy.bids(s));
  r["objective"] = ours.objective;
  Json per = Json::array();
  for (const auto& loc : ours.per_location) per.push_back(to_json(loc, inv.verbose));
  r["per_location"] = per;
  r["certificate"] = to_json(cert);
  r["lower_bound_objective"] = lower.objective;
  r["conservative_objective"] = conservative.objective;
  r["feasibility"] = feasibility_json(feas);
  r["search"] = {{"sigma_hi", params.sigma_hi}, {"sigma_lo", params.sigma_lo},
                 {"mc_samples", params.mc_samples}, {"seed", params.master_seed}};
  write_json(fs::path(inv.output_dir) / "solve_soft.json", r);

  out << "soft chance constraints, T=" << s.periods() << " L=" << s.locations()
      << " beta=" << fmt("%g", s.spec().soft_spec().beta) << "\n";
  out << "  payment            " << fmt("%.6f", ours.objective) << "\n";
  out << "  lower bound        " << fmt("%.6f", lower.objective) << "\n";
  out << "  conservative       " << fmt("%.6f", conservative.objective) << "\n";
  out << "  gap bound          " << fmt("%.6f", cert.bound) << "\n";
  out << "location  k     gamma        q_est     exact_tail  samples   esc\n";
  for (std::size_t l = 0; l < ours.per_location.size(); ++l) {
    const auto& loc = ours.per_location[l];
    char line[128];
    std::snprintf(line, sizeof line, "%-8zu  %-4d  %-11.6f  %-8.4f  %-10.6f  %-8lld  %d%s\n", l,
                  loc.k, loc.gamma_final, loc.q_estimate, loc.exact_tail_check,
                  static_cast<long long>(loc.samples), loc.escalations,
                  loc.fell_back ? "  (full)" : "");
    out << line;
  }
  return kExitOk;
}

int special_case(const CliInvocation& inv, std::ostream& out) {
  const Json j = load_config(inv);
  const Scenario s = parse_scenario(j);
  if (!s.spec().is_soft()) throw ConfigError("spec.type: special-case needs a soft spec");
  const ClosedFormOutcome cf = closed_form_policy(s);
  const GapCertificate cert = certify_closed_form_gap(s);
  const auto feas = verify_soft_feasibility(cf.policy, s);
  const SolveOutcome lower = solve_relaxed_soft(s);

  Json r = {{"subcommand", "special-case"}};
  r.update(shape(s));
  r["beta"] = s.spec().soft_spec().beta;
  r["alpha"] = s.spec().soft_spec().alpha;
  Json per = Json::array();
  for (const auto& v : cf.per_location) {
    per.push_back({{"rho", v.value}, {"unclamped", v.unclamped}, {"clamped", v.clamped}});
  }
  r["per_location"] = per;
  r["policy"] = to_json(cf.policy);
  r["bids"] = to_json(cf.policy.bids(s));
  r["objective"] = cf.objective;
  r["lower_bound_objective"] = lower.objective;
  r["certificate"] = to_json(cert);
  r["feasibility"] = feasibility_json(feas);
  write_json(fs::path(inv.output_dir) / "special_case.json", r);

  out << "closed-form policy, T=" << s.periods() << " L=" << s.locations()
      << " beta=" << fmt("%g", s.spec().soft_spec().beta) << "\n";
  out << "  payment            " << fmt("%.6f", cf.objective) << "\n";
  out << "  lower bound        " << fmt("%.6f", lower.objective) << "\n";
  out << "  gap bound          " << fmt("%.6f", cert.bound) << "\n";
  out << "location  rho        clamped  exact_tail  slack\n";
  for (std::size_t l = 0; l < cf.per_location.size(); ++l) {
    char line[128];
    std::snprintf(line, sizeof line, "%-8zu  %-9.6f  %-7s  %-10.6f  %+.6f\n", l,
                  cf.per_location[l].value, cf.per_location[l].clamped ? "yes" : "no",
                  feas[l].tail, feas[l].slack);
    out << line;
  }
  return kExitOk;
}

ExperimentConfig experiment_config(const CliInvocation& inv) {
  ExperimentConfig c = inv.config_path.empty() ? ExperimentConfig{}
                                               : parse_experiment(read_json_file(inv.config_path));
  if (inv.seed) c.master_seed = *inv.seed;
  if (inv.mc_samples) c.search.mc_samples = *inv.mc_samples;
  if (inv.replications) c.replications = *inv.replications;
  validate(c);
  return c;
}

void print_table1(std::ostream& out, const std::vector<Table1Row>& rows) {
  out << "1-eps   our         lower_bound  uniform      random\n";
  for (const auto& r : rows) {
    char line[128];
    std::snprintf(line, sizeof line, "%-6.2f  %-10.4g  %-11.4g  %-11.4g  %-11.4g\n",
                  r.one_minus_epsilon, r.our, r.lower_bound, r.uniform, r.random);
    out << line;
  }
}

void print_gaps(std::ostream& out, const std::string& title, const std::vector<GapRow>& rows) {
  out << title << "\n  requirement  policy    mean_gap      stderr\n";
  for (const auto& r : rows) {
    char line[128];
    std::snprintf(line, sizeof line, "  %-11.2f  %-8s  %-12.6f  %.6f\n", r.requirement,
                  r.policy.c_str(), r.mean_gap, r.stderr_gap);
    out << line;
  }
}

void emit_table1(const ExperimentConfig& c, const fs::path& dir, std::ostream& out) {
  const auto rows = run_table1(c);
  write_csv(dir / "table1.csv", write_table1_csv, rows);
  out << "success probability vs requirement (hard)\n";
  print_table1(out, rows);
}

void emit_sweeps(const ExperimentConfig& c, const fs::path& dir, std::ostream& out) {
  const auto hard = run_hard_gap_sweep(c);
  write_csv(dir / "gap_hard.csv", write_gap_csv, hard);
  print_gaps(out, "time-average gap, hard", hard);
  for (std::size_t i = 0; i < c.alpha_settings.size(); ++i) {
    const auto soft = run_soft_gap_sweep(c, i);
    const std::string name = "gap_soft_setting" + std::to_string(i + 1) + ".csv";
    write_csv(dir / name, write_gap_csv, soft);
    print_gaps(out, "time-average gap, soft setting " + std::to_string(i + 1), soft);
  }
}

int dispatch(const CliInvocation& inv, std::ostream& out) {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), inv.subcommand) == kSubcommands.end()) {
    throw ConfigError("subcommand: unknown '" + inv.subcommand + "'");
  }
  std::error_code ec;
  fs::create_directories(inv.output_dir, ec);
  if (ec) throw ConfigError("--out: cannot create " + inv.output_dir + ": " + ec.message());

  if (inv.subcommand == "solve-hard") return solve_hard(inv, out);
  if (inv.subcommand == "solve-soft") return solve_soft(inv, out);
  if (inv.subcommand == "special-case") return special_case(inv, out);
  const ExperimentConfig c = experiment_config(inv);
  const fs::path dir(inv.output_dir);
  if (inv.subcommand == "table1" || inv.subcommand == "simulate") emit_table1(c, dir, out);
  if (inv.subcommand == "sweep" || inv.subcommand == "simulate") emit_sweeps(c, dir, out);
  return kExitOk;
}

}  // namespace

int run(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(inv, out);
  } catch (const NonTerminationError& e) {
    err << "error: non-termination: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InfeasibleError& e) {
    err << "error: infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace crowdsense
