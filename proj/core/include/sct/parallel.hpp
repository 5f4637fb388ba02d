#pragma once

#include <cstddef>
#include <functional>

namespace sct {

/// Global worker count for data-parallel loops (1 = fully sequential).
void set_num_threads(int n);
int num_threads();

/// Runs fn(i) for i in [begin, end) on up to num_threads() workers using a
/// static contiguous partition. Callers must only write to disjoint state per
/// index; reductions belong to the caller so results stay deterministic.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& fn);

} // namespace sct
