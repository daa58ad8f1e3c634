#pragma once

// Deterministic data-parallel helper: the index range is split into
// contiguous chunks, one per worker, and every index writes only its own
// output slots. Results are identical for any worker count.

#include <cstddef>
#include <thread>
#include <vector>

namespace srl {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (count == 0) return;
    if (threads <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::size_t nworkers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (std::size_t w = 0; w < nworkers; ++w) {
        std::size_t lo = count * w / nworkers;
        std::size_t hi = count * (w + 1) / nworkers;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace srl
