#pragma once

#include <cstddef>
#include <functional>

namespace amm {

// Worker count: MM_OPT_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

// Runs body(chunk) for every chunk in [0, n_chunks). Chunks are distributed
// over worker_count() threads; callers write into per-chunk slots and reduce
// in chunk order afterwards, so results never depend on the worker count.
void for_each_chunk(std::size_t n_chunks, const std::function<void(std::size_t)>& body);

}  // namespace amm
