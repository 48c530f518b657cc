#pragma once

#include <functional>

namespace retarget {

// Maps 0 to the hardware thread count; never returns less than 1.
int resolve_threads(int requested);

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// executed exactly once; callers own any cross-index reduction order.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace retarget
