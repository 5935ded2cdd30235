#pragma once

// Deterministic partitioned reduction. Work is split into a fixed number of
// chunks that does not depend on the thread count; per-chunk results are
// merged in chunk order, so the output is identical for any schedule.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hofa {

constexpr unsigned kChunks = 64;

unsigned thread_count();
void set_thread_count(unsigned k);

/// Runs fn(c) for c in [0, chunks) on up to thread_count() threads.
template <class Fn>
void parallel_chunks(unsigned chunks, Fn&& fn) {
    const unsigned workers = std::min(thread_count(), chunks);
    if (workers <= 1) {
        for (unsigned c = 0; c < chunks; ++c) fn(c);
        return;
    }
    std::atomic<unsigned> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (unsigned c = next++; c < chunks; c = next++) {
            try {
                fn(c);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

/// Maps [0, total) in kChunks contiguous pieces and folds the partial results
/// left to right: init, then merge(acc, partial_c) for c = 0, 1, ...
template <class T, class Map, class Merge>
T parallel_reduce(std::uint64_t total, T init, Map&& map, Merge&& merge) {
    const unsigned chunks = static_cast<unsigned>(std::min<std::uint64_t>(kChunks, std::max<std::uint64_t>(total, 1)));
    std::vector<T> partial(chunks, init);
    parallel_chunks(chunks, [&](unsigned c) {
        const std::uint64_t base = total / chunks, extra = total % chunks;
        const std::uint64_t first = c * base + std::min<std::uint64_t>(c, extra);
        const std::uint64_t last = first + base + (c < extra ? 1 : 0);
        partial[c] = map(first, last, partial[c]);
    });
    T acc = std::move(init);
    for (auto& part : partial) merge(acc, part);
    return acc;
}

}  // namespace hofa
