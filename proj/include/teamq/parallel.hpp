#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace teamq {

/// Worker count from TEAMQ_WORKERS, else hardware concurrency (at least 1).
std::size_t default_workers();

/// Runs body(i) for i in [0, n) on up to `workers` threads, static striping.
/// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace teamq
