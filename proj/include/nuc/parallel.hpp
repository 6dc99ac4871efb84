#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nuc {

/// Runs `fn(i)` for i in [0, n) on at most `parallelism` threads. Work is handed
/// out by an atomic counter, so callers must write results by index. The first
/// exception thrown (lowest index wins) is rethrown after all workers stop; no
/// new indices are started once one has failed.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t parallelism, Fn&& fn) {
    if (n == 0) return;
    const std::size_t workers = std::clamp<std::size_t>(parallelism, 1, n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_index = n;

    auto work = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
                failed = true;
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    for (std::size_t t = 0; t + 1 < workers; ++t) threads.emplace_back(work);
    work();
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

inline std::size_t default_parallelism() {
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace nuc
