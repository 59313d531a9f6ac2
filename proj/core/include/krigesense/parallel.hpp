#pragma once

#include <cstddef>
#include <functional>

namespace krigesense {

inline constexpr std::size_t max_threads = 256;

// Worker count: KRIGESENSE_THREADS when set to a positive integer (at most
// max_threads), otherwise the hardware concurrency.
std::size_t thread_count();

// Runs body(i) for i in [0, n). Bodies must write only to slot i of their
// outputs. If any body throws, the exception from the lowest index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = thread_count());

}  // namespace krigesense
