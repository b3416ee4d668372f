#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace rflow {

inline unsigned effective_workers(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Run fn(i) for i in [0, n). Results must be written to per-index slots;
/// then the outcome is identical for any worker count.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& fn) {
    workers = effective_workers(workers);
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace rflow
