#pragma once
// Worker-pool helper shared by centrality, layout, and the simulation
// ensemble. Workers always write to caller-owned disjoint slots; any
// floating-point reduction happens afterwards in index order, so results do
// not depend on the thread count.

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace triarch {

// 0 means "auto": TRIARCH_THREADS if set, otherwise hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TRIARCH_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs fn(begin, end) over a partition of [0, count) on `threads` workers.
template <class F>
void parallel_blocks(std::size_t count, unsigned threads, F&& fn) {
    threads = std::max(1u, threads);
    if (count == 0) return;
    if (threads == 1 || count == 1) {
        fn(std::size_t{0}, count);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, count);
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace triarch
