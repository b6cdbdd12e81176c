#pragma once

#include <cstddef>
#include <functional>

namespace kgalign {

// Worker count resolution: explicit request > KGALIGN_WORKERS env var >
// hardware concurrency.
int resolve_workers(int requested);

// Runs fn over [0, n) split into contiguous chunks, one thread per chunk.
// Callers must write disjoint outputs per index for deterministic results.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t begin, std::size_t end)>& fn);

}  // namespace kgalign
