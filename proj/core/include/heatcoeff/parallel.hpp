#pragma once

/*! \file
    \brief Static-partition parallel loop used by grid sweeps and operator assembly.
*/

#include <cstddef>
#include <functional>

namespace heatcoeff {

/*! Thread count: an explicit positive request wins, then HEATCOEFF_THREADS, then the
    hardware concurrency. Invalid environment values are ignored. */
int resolve_threads(int requested = 0);

//! Process-wide default used when a call passes threads = 0.
void set_default_threads(int threads);
int default_threads();

/*! Runs body(i) for i in [0, n). Iterations are split into contiguous chunks; the first
    exception thrown by any worker is rethrown on the calling thread. */
void parallel_for(size_t n, const std::function<void(size_t)>& body, int threads = 0);

}  // namespace heatcoeff
