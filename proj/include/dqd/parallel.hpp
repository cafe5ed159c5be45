// parallel.hpp: fan-out over independent work items.

#pragma once

#include <cstddef>
#include <functional>

namespace dqd {

// Environment variable overriding the worker count.
inline constexpr const char* kWorkersEnv = "DQD_WORKERS";

// DQD_WORKERS if set to a positive integer, else hardware concurrency (>= 1).
std::size_t worker_count();

// Calls fn(i) for every i in [0, n) on up to `workers` threads (0 = worker_count()).
// Items are claimed dynamically; callers write results into slot i so the
// outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t workers = 0);

}  // namespace dqd
