#pragma once

#include <cstddef>
#include <functional>

namespace levy {

// Worker count: hardware concurrency, capped by the LEVY_GIBBS_THREADS
// environment variable when it holds a positive integer.
unsigned worker_count();

// Runs task(i) for i in [0, count) on up to `workers` threads (0 = worker_count()).
// Tasks must write to disjoint outputs; ordering of results is up to the caller.
// The first exception thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task,
                  unsigned workers = 0);

}  // namespace levy
