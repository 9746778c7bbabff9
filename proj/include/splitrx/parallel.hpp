#pragma once

// Minimal deterministic work distribution. Tasks are indexed 0..n-1 and each
// task derives its own RNG stream, so any merge that is order-independent
// (integer count accumulation, per-index result slots) yields results that do
// not depend on the number of workers. SPLITRX_THREADS caps the pool.

#include <atomic>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace splitrx {

namespace detail {
inline unsigned& thread_cap_override() {
    static unsigned cap = 0;  // 0 = not set
    return cap;
}
}  // namespace detail

// Programmatic cap; 0 restores automatic selection. Overrides the env var.
inline void set_thread_cap(unsigned n) { detail::thread_cap_override() = n; }

inline unsigned max_threads() {
    if (unsigned cap = detail::thread_cap_override(); cap > 0) return cap;
    if (const char* env = std::getenv("SPLITRX_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs fn(i) for i in [0, n). fn must only touch per-index state or merge
// through order-independent accumulation.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(max_threads(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace splitrx
