#pragma once

#include <cstddef>
#include <functional>

namespace uql {

// Worker count: UQL_THREADS if set, else hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, count). Results must go to fixed slots indexed by
// i so that output does not depend on scheduling. The exception thrown for the
// smallest index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  int workers = 0);

}  // namespace uql
