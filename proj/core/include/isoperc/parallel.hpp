#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace isoperc {

unsigned default_threads() noexcept;

/// Runs fn(i) for every i in [0, count) on up to `threads` workers (0 means
/// default_threads()). Work is handed out in index chunks; callers write
/// results into per-index slots so the outcome never depends on scheduling.
/// The first exception thrown by any worker is rethrown on the caller.
template <class Fn>
void for_each_replica(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = default_threads();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t chunk = std::max<std::size_t>(1, count / (threads * 8));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                try {
                    for (;;) {
                        const std::size_t begin = next.fetch_add(chunk);
                        if (begin >= count) break;
                        const std::size_t end = std::min(count, begin + chunk);
                        for (std::size_t i = begin; i < end; ++i) fn(i);
                    }
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(count);
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

} // namespace isoperc
