#pragma once

#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace kdn {

// Resolve a worker count: explicit request > KDN_THREADS env var > hardware.
// Always at least 1.
inline int resolve_threads(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("KDN_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0)
            return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Run body(begin, end, worker) over [0, count) split into contiguous chunks,
// one chunk per worker. Chunk boundaries depend only on (count, threads), and
// callers must write disjoint output ranges, so results are independent of
// scheduling. body is invoked inline when a single worker suffices.
template <typename Body>
void parallel_chunks(std::size_t count, int threads, Body&& body)
{
    const int workers =
        static_cast<int>(std::min<std::size_t>(std::max(threads, 1), count ? count : 1));
    if (workers <= 1) {
        body(std::size_t{0}, count, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::size_t chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(count, chunk * static_cast<std::size_t>(w));
        const std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&body, begin, end, w] { body(begin, end, w); });
    }
    for (auto& t : pool)
        t.join();
}

} // namespace kdn
