#pragma once

#include <cstddef>
#include <functional>

namespace crowdsense {

inline constexpr const char* kThreadsEnvVar = "ROBUST_CROWDSENSE_THREADS";

/// Worker count from ROBUST_CROWDSENSE_THREADS; unset, empty or 0 means the
/// hardware concurrency. Malformed values throw ConfigError.
std::size_t configured_workers();

/// Calls fn(i) for i in [0, n) on up to `workers` threads. Callers write to
/// slot i only, so results do not depend on scheduling. If any call throws,
/// the exception of the lowest failing index is rethrown after all workers
/// finish.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  parallel_for(n, configured_workers(), fn);
}

}  // namespace crowdsense
