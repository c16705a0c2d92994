#pragma once

#include <cstddef>
#include <functional>

namespace rwb {

/// Worker cap: RWB_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs body(begin, end) over contiguous slices of [0, count). Each index
/// belongs to exactly one slice, so per-index outputs do not depend on the
/// number of workers.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  int workers = worker_count());

}  // namespace rwb
