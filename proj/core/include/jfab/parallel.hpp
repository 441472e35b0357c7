#pragma once

#include <cstdint>
#include <functional>

namespace jfab {

// Worker count: min(JF_THREADS, hardware_concurrency), at least 1.
// JF_THREADS only caps parallelism; results never depend on it.
int worker_count();

// Runs fn(chunk_index) for chunk_index in [0, chunk_count). Chunks are
// distributed to a pool of workers; each chunk must write only to its own
// output slot so that the merged result is order-independent.
void parallel_for_chunks(std::int64_t chunk_count, const std::function<void(std::int64_t)>& fn);

}  // namespace jfab
