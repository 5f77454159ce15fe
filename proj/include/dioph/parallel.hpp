#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace dioph {

// Global worker cap shared by all parallel loops (CLI --threads / env).
inline int& thread_cap_ref() {
    static int cap = 0;  // 0 = use hardware_concurrency
    return cap;
}

inline void set_thread_cap(int cap) { thread_cap_ref() = cap; }

inline int effective_threads() {
    int cap = thread_cap_ref();
    if (cap <= 0) {
        unsigned hc = std::thread::hardware_concurrency();
        cap = hc == 0 ? 1 : static_cast<int>(hc);
    }
    return cap;
}

// Runs fn(chunk_index) for chunk_index in [0, n_chunks). The chunk layout is
// fixed by the caller and independent of the worker count, so writing results
// into per-chunk slots keeps output identical across thread counts.
template <class F>
void parallel_chunks(int n_chunks, F&& fn) {
    int workers = std::min(effective_threads(), n_chunks);
    if (workers <= 1) {
        for (int i = 0; i < n_chunks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n_chunks) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace dioph
