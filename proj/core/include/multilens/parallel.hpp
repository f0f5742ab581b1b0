#ifndef MULTILENS_PARALLEL_HPP
#define MULTILENS_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace multilens {

/// Worker count: hardware concurrency, capped by the MULTILENS_THREADS
/// environment variable when set. Always >= 1.
int worker_count();

/// Runs fn(begin, end) over a partition of [0, n) on worker_count() threads.
/// Chunks are contiguous, so writers indexing by element stay race-free and
/// results are independent of the thread count.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace multilens

#endif
