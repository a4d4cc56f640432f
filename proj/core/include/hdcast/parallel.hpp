#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace hdcast {

// Process-wide cap on worker threads; 0 means hardware concurrency.
void set_max_threads(std::size_t threads);
std::size_t max_threads();

// Runs body(i) for i in [0, n). Each index is handled exactly once; callers
// write results into per-index slots so the outcome is independent of scheduling.
template <class Body> void parallel_for(std::size_t n, Body &&body) {
    const std::size_t workers = std::min(max_threads(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto loop = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(loop);
    loop();
    for (auto &t : pool) t.join();
    for (auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace hdcast
