#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace mlin {

/// Runs fn(i) for i in [0, count).  Work is split into contiguous chunks per
/// worker; fn must only write to slots owned by index i, which keeps results
/// identical for any worker count.
inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    if (workers <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t w = std::min<std::size_t>(workers, count);
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t t = 0; t < w; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += w) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace mlin
