#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bm4d {

// Worker count resolution: explicit request > BONEMAP4D_THREADS > hardware.
// A request of 0 means "auto".
inline unsigned resolve_thread_count(unsigned requested = 0) {
    if (requested == 0) {
        if (const char* env = std::getenv("BONEMAP4D_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0) requested = static_cast<unsigned>(v);
        }
    }
    if (requested == 0) {
        requested = std::thread::hardware_concurrency();
        if (requested == 0) requested = 1;
    }
    return requested;
}

// Runs fn(i) for i in [0, n). Indices are split into contiguous chunks, one
// worker per chunk; chunk boundaries depend only on n and the worker count, so
// callers that write to disjoint per-index slots get bit-identical results for
// any thread count. The first exception thrown by a worker is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = 0) {
    if (n == 0) return;
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_thread_count(threads), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace bm4d
