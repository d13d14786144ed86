// Internal index-parallel loop. Thread count is capped by the
// INTRINSIC_CAP_THREADS environment variable; results must be written by
// index so aggregation order stays deterministic.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace icap::detail {

inline int thread_budget() {
    if (const char* env = std::getenv("INTRINSIC_CAP_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

template <typename Fn>
void parallel_for(long long count, Fn&& fn) {
    const long long threads = std::min<long long>(thread_budget(), count);
    if (threads <= 1) {
        for (long long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<long long> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (long long t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            try {
                for (long long i = next++; i < count; i = next++) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace icap::detail
