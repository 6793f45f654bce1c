#pragma once

#include <Eigen/Core>
#include <functional>

namespace drpolicy {

// Worker count: `requested` if positive, else the DRPOLICY_WORKERS environment
// variable, else hardware concurrency.
int resolve_workers(int requested);

// Runs fn(0..count-1) across workers. Callers own determinism: tasks must
// write only to their own index's slot and any reduction happens afterwards
// in index order. The first exception thrown by a task is rethrown.
void parallel_for(Eigen::Index count, int workers, const std::function<void(Eigen::Index)>& fn);

}  // namespace drpolicy
