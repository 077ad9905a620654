#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace erl {

/// Worker count used by data-parallel loops. ERL_THREADS (positive integer)
/// caps it; otherwise the hardware default applies.
inline unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ERL_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return hw;
}

/// Runs f(i) for i in [0, n). Used only for independent per-cell maps, so the
/// result does not depend on the thread count.
template <typename F>
void parallel_for(std::size_t n, F&& f, std::size_t grain = 4096) {
    unsigned workers = worker_count();
    if (workers <= 1 || n <= grain) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    unsigned chunks = std::min<std::size_t>(workers, (n + grain - 1) / grain);
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    std::size_t per = (n + chunks - 1) / chunks;
    for (unsigned c = 0; c < chunks; ++c) {
        std::size_t lo = c * per;
        std::size_t hi = std::min(n, lo + per);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &f] {
            for (std::size_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace erl
