#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ecfield {

// Runs run_chunk(c) for every c in [0, n_chunks) across n_threads workers.
// Chunks are claimed from an atomic counter, so assignment to workers is
// arbitrary; callers own per-chunk result slots and must combine them in
// chunk order to stay deterministic. The first worker exception is rethrown
// on the calling thread after all workers stop.
inline void parallel_chunks(std::size_t n_chunks, unsigned n_threads,
                            const std::function<void(std::size_t)>& run_chunk) {
    if (n_chunks == 0) return;
    if (n_threads <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                run_chunk(c);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned count = static_cast<unsigned>(
        std::min<std::size_t>(n_threads, n_chunks));
    pool.reserve(count);
    for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Worker count: ECFIELD_THREADS overrides, else hardware concurrency.
unsigned default_thread_count();

}  // namespace ecfield
