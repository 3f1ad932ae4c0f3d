#include "crowdsense/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "crowdsense/errors.hpp"

namespace crowdsense {

std::size_t configured_workers() {
  const char* raw = std::getenv(kThreadsEnvVar);
  std::size_t requested = 0;
  if (raw != nullptr && *raw != '\0') {
    const std::string text(raw);
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), requested);
    if (ec != std::errc() || end != text.data() + text.size()) {
      throw ConfigError(std::string(kThreadsEnvVar) + " must be a nonnegative integer, got '" +
                        text + "'");
    }
  }
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  workers = std::clamp<std::size_t>(workers, 1, n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace crowdsense
