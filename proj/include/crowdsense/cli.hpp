#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace crowdsense {

inline const std::vector<std::string> kSubcommands{"solve-hard", "solve-soft", "special-case",
                                                   "simulate",   "table1",     "sweep"};

struct CliInvocation {
  std::string subcommand;
  /// Required for the solve commands; optional for simulate/table1/sweep
  /// (built-in defaults when empty).
  std::string config_path;
  std::string output_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> mc_samples;
  std::optional<int> replications;
  bool verbose = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitInfeasible = 2;

/// Runs one subcommand: writes result files into output_dir, a readable
/// summary to `out` and diagnostics to `err`. Returns 0 on success, 1 on
/// configuration/domain errors, 2 on infeasibility or non-termination.
int run(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

}  // namespace crowdsense
