#pragma once

#include <cstddef>
#include <functional>

namespace stochfrac {

/// Thread cap resolved from STOCHFRAC_THREADS (0 or unset = hardware concurrency).
int thread_count();

/// Runs fn(i) for i in [0, n). May execute on multiple threads; every index is
/// processed exactly once, so the result is order-independent as long as fn(i)
/// writes only to slot i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace stochfrac
