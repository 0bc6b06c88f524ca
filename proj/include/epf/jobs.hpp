#pragma once

#include <functional>

namespace epf {

// Runs task(0) .. task(count - 1) on up to `jobs` worker threads. Tasks must
// write results into index-addressed slots only, so the outcome is identical
// for any job count. The lowest-index exception, if any, is rethrown after
// all workers finish.
void parallel_for(int jobs, long count, const std::function<void(long)>& task);

}  // namespace epf
