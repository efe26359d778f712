#pragma once

#include <cstddef>
#include <functional>

namespace opkernel {

/// Worker count resolved from the OPKERNEL_THREADS environment variable;
/// 0 or unset means hardware concurrency.
int worker_count();

/// Runs fn(begin, end) over contiguous chunks of [0, n), possibly on several
/// threads.  Chunks write disjoint output ranges, so results are independent
/// of the worker count.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace opkernel
