#pragma once

#include <functional>

namespace disslab {

// Worker count: set_thread_count() if called, else DISSLAB_THREADS, else 1.
int thread_count();
void set_thread_count(int n);

// Runs body(i) for i in [0, count) across thread_count() workers. Bodies must only write
// to slots owned by i; callers reduce the slots in index order afterwards.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace disslab
