#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace cylflow {

// Runs fn(i) for i in [0, count) on up to `threads` workers and returns the
// results ordered by i. The schedule never affects the output, only the wall
// time, which is what makes --threads a pure performance knob.
template <typename Fn>
auto run_indexed(std::int64_t count, int threads, Fn&& fn)
    -> std::vector<std::decay_t<decltype(fn(std::int64_t{0}))>> {
    using R = std::decay_t<decltype(fn(std::int64_t{0}))>;
    std::vector<R> out(static_cast<std::size_t>(count));
    if (count == 0) return out;
    if (threads <= 1) {
        for (std::int64_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
        return out;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count || failed.load(std::memory_order_relaxed)) return;
            try {
                out[static_cast<std::size_t>(i)] = fn(i);
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = threads < static_cast<int>(count) ? threads : static_cast<int>(count);
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(first_error);
    return out;
}

}  // namespace cylflow
