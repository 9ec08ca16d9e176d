#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace cascade {

/// Worker count: CASCADE_THREADS if set to a positive integer, else the
/// machine's hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("CASCADE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count) on up to `threads` workers with a static
/// interleaved partition. fn must only write to slot-owned state.
template <class Fn>
void parallel_for(std::uint64_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = worker_count();
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
    if (threads <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::uint64_t i = w; i < count; i += threads) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace cascade
