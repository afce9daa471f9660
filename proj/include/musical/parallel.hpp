#pragma once

#include <cstddef>
#include <functional>

namespace musical {

/// Number of workers to use when the caller asks for 0 ("all cores").
int resolve_thread_count(int requested);

/// Calls fn(i) for every i in [0, count) on up to `threads` workers.
/// Indices are handed out dynamically; fn must only write state owned by index i.
/// The first exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace musical
