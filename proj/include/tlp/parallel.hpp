#pragma once

#include <cstddef>
#include <functional>

namespace tlp {

// Global worker cap, set once by the CLI --threads flag (0 = hardware).
void set_thread_cap(int n);
int thread_cap();

// Runs fn(0..count-1) on up to `threads` workers (0 = use the global cap).
// Each index must only write to its own output slot; the first exception
// thrown by a worker is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

}  // namespace tlp
