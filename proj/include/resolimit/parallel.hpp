#pragma once

#include <functional>

namespace resolimit {

// Resolves the worker count: explicit request > RESOLIMIT_THREADS > hardware.
int resolve_thread_count(int requested);

// Runs body(i) for i in [0, n) on up to n_threads workers (the calling
// thread participates). Work items are claimed from a shared atomic
// counter; callers must write results into per-index slots so the outcome
// is independent of scheduling. Exceptions from body are rethrown on the
// caller after all workers finish.
void parallel_for(int n, int n_threads, const std::function<void(int)>& body);

}  // namespace resolimit
