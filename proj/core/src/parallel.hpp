#pragma once

#include <cstddef>
#include <functional>

namespace crossfit::detail {

/// Worker count: CROSSFIT_THREADS when set and positive, else hardware concurrency.
int thread_budget();

/// Runs fn(i) for i in [0, count), partitioned over at most thread_budget() threads.
/// fn must be safe to call concurrently for distinct i; exceptions are rethrown on
/// the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace crossfit::detail
