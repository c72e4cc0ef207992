#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace toadwave {

// Worker count: TOADWAVE_THREADS caps it, hardware_concurrency is the default.
inline unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("TOADWAVE_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

// Static partition of [0, n) over the workers. Results must be written to
// disjoint slots so the outcome is identical for any thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned nw = worker_count();
    if (nw <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    nw = std::min<unsigned>(nw, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (unsigned w = 0; w < nw; ++w) {
        pool.emplace_back([=, &body] {
            for (std::size_t i = w; i < n; i += nw) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace toadwave
