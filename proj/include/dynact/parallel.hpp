#pragma once

#include <cstddef>
#include <functional>

namespace dynact {

/// Upper bound on worker threads. Initialised from DYNACT_THREADS when set,
/// otherwise the hardware concurrency.
std::size_t max_threads();
void set_max_threads(std::size_t n);

/// Runs body(i) for every i in [begin, end). Iterations must be independent;
/// results then do not depend on the number of threads.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

/// Range version: body(first, last) on disjoint chunks.
void parallel_for_range(std::size_t begin, std::size_t end,
                        const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace dynact
