#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace mmrb {

/// Process-wide worker count for the data-parallel loops over angular nodes.
/// 1 (the default) runs everything on the calling thread.
void set_thread_count(int n);
int thread_count();

/// Runs fn(i) for i in [0, n). Loop bodies must write to disjoint outputs;
/// results are identical for any thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace mmrb
