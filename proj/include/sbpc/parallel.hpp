#pragma once

#include <functional>

namespace sbpc {

/// Worker count for embarrassingly parallel run batches: the SBPC_WORKERS
/// environment variable when set, otherwise the hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n) across the configured workers. Results must be
/// written to caller-owned per-index slots; iteration order inside a worker
/// is ascending, so aggregation over the index range is deterministic.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace sbpc
