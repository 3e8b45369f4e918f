#pragma once

// Minimal bounded worker pool for index-parallel loops. Work is split into
// fixed chunks by index, so results written per index are identical for any
// worker count.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace rcoase {

inline int default_jobs() {
    if (const char* env = std::getenv("ROBUST_COASE_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return j;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                         int jobs = 0) {
    if (jobs <= 0) jobs = default_jobs();
    jobs = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), std::max<std::size_t>(n, 1)));
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    const std::size_t chunk = (n + static_cast<std::size_t>(jobs) - 1) / static_cast<std::size_t>(jobs);
    for (int w = 0; w < jobs; ++w) {
        const std::size_t a = static_cast<std::size_t>(w) * chunk;
        const std::size_t b = std::min(n, a + chunk);
        if (a >= b) break;
        pool.emplace_back([a, b, &body] {
            for (std::size_t i = a; i < b; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace rcoase
