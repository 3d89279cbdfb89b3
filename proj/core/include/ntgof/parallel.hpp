#pragma once

#include <cstddef>
#include <functional>

namespace ntgof {

/// Worker count from NTGOF_THREADS (0 or unset = hardware concurrency).
/// A positive `requested` value overrides the environment.
std::size_t resolve_workers(std::size_t requested = 0);

/// Runs body(i) for i in [0, count) on up to `workers` threads. Items are
/// independent; callers store results by index so the outcome never depends
/// on scheduling. Every item runs; the exception from the lowest failing index is rethrown.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace ntgof
