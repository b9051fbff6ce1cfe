#pragma once

#include <cstddef>
#include <functional>

namespace fpgm {

// Process-wide worker count used by operators that parallelize internally.
// Results never depend on this value: work is split into a fixed set of
// blocks and reductions are merged in block order.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(block) for block in [0, n_blocks), distributing blocks over
// thread_count() workers. Exceptions from any block are rethrown.
void parallel_blocks(std::size_t n_blocks, const std::function<void(std::size_t)>& body);

} // namespace fpgm
