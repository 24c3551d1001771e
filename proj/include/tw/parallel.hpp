#pragma once

#include <cstddef>
#include <functional>

namespace tw {

/// Number of worker threads used by parallel_for. Defaults to the TW_THREADS
/// environment variable, or 1.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, count). Iterations must write to disjoint
/// outputs; results never depend on the thread count because every index is
/// computed by the same serial code path.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace tw
