#pragma once

#include <cstdint>
#include <functional>

namespace cpsd {

/// Maps the user-facing thread count (0 = all hardware threads) to a
/// concrete worker count >= 1.
int resolve_threads(int requested);

/// Runs fn(i) for i in [0, n). Work is split into fixed contiguous chunks so
/// that where each index runs never depends on timing; fn must write only to
/// its own slot of any shared output.
void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace cpsd
