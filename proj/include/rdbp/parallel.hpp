#pragma once

#include <cstddef>
#include <functional>

namespace rdbp {

// Worker count: RDBP_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

// Calls fn(k) for k in [0, n). Each index runs exactly once; order across threads is unspecified.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace rdbp
