#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "crowdsense/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Minimum-payment bidding policies for crowdsensing under chance constraints"};
  app.require_subcommand(1);

  crowdsense::CliInvocation inv;
  std::uint64_t seed = 0;
  std::int64_t mc_samples = 0;
  int replications = 0;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* config = sub->add_option("--config", inv.config_path, "JSON configuration file")
                       ->check(CLI::ExistingFile);
    if (config_required) config->required();
    sub->add_option("--out", inv.output_dir, "Directory for result files")->capture_default_str();
    sub->add_option("--seed", seed, "Override the master seed");
    sub->add_option("--mc-samples", mc_samples, "Monte Carlo samples per estimate")
        ->check(CLI::PositiveNumber);
    sub->add_option("--replications", replications, "Replications per grid point")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--verbose", inv.verbose, "Print policies and search trajectories");
  };

  add_common(app.add_subcommand("solve-hard", "Solve a scenario under a joint chance constraint"), true);
  add_common(app.add_subcommand("solve-soft", "Binary-search policy for per-location soft constraints"), true);
  add_common(app.add_subcommand("special-case", "Closed-form policy for time-independent soft scenarios"), true);
  add_common(app.add_subcommand("simulate", "Success-probability table and all gap sweeps"), false);
  add_common(app.add_subcommand("table1", "Success probability vs requirement, hard case"), false);
  add_common(app.add_subcommand("sweep", "Time-average payment gap sweeps"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : crowdsense::kExitConfig;
  }

  for (const auto* sub : app.get_subcommands()) {
    inv.subcommand = sub->get_name();
    if (sub->count("--seed") > 0) inv.seed = seed;
    if (sub->count("--mc-samples") > 0) inv.mc_samples = mc_samples;
    if (sub->count("--replications") > 0) inv.replications = replications;
  }
  return crowdsense::run(inv, std::cout, std::cerr);
}
