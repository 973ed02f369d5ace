#pragma once

#include <cstddef>
#include <functional>

namespace bnet {

/// Worker count: BALANCED_NET_THREADS when set to a positive integer,
/// otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 means
/// worker_count()). Indices are handed out dynamically; the first exception
/// thrown by any call is rethrown after all threads join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t workers = 0);

}  // namespace bnet
