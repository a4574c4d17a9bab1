#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "gfflab/gaussian_field.hpp"
#include "gfflab/rng.hpp"

namespace gfflab {

struct ReplicaOptions {
    unsigned workers = 0;       // 0: hardware concurrency
    std::size_t block = 64;     // replicas per batched sampling call
};

/// Samples M fields and maps each to a result.
///
/// Replica i always uses the stream derive(key, i) and lands in slot i of
/// the result, so the output depends on neither the worker count nor the
/// scheduling. Blocks are a fixed partition of [0, M).
/// `fn(replica_index, heights)` receives the full-grid heights.
template <class R, class Fn>
std::vector<R> map_replicas(const GreenOperator& green, const StreamKey& key, std::size_t replicas, Fn fn,
                            const ReplicaOptions& opts = {}) {
    std::vector<R> results(replicas);
    const std::size_t block = std::max<std::size_t>(1, opts.block);
    const std::size_t blocks = (replicas + block - 1) / block;
    unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(blocks, 1)));

    const FieldLayout& layout = green.layout();
    std::vector<std::size_t> grid_index(layout.size());
    for (std::size_t s = 0; s < layout.size(); ++s) grid_index[s] = layout.box.index(layout.active[s]);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        std::vector<double> grid(layout.box.vertex_count(), 0.0);
        try {
            for (std::size_t b = next++; b < blocks; b = next++) {
                const std::size_t first = b * block;
                const std::size_t count = std::min(block, replicas - first);
                const Eigen::MatrixXd phi = sample_block(green, key, first, count);
                for (std::size_t j = 0; j < count; ++j) {
                    const double* col = phi.col(static_cast<Eigen::Index>(j)).data();
                    for (std::size_t s = 0; s < grid_index.size(); ++s) grid[grid_index[s]] = col[s];
                    results[first + j] = fn(static_cast<std::uint64_t>(first + j), std::span<const double>(grid));
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = blocks;
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

/// Folds every replica into a per-worker accumulator and merges them.
///
/// Only use with accumulators whose merge is exact and commutative (integer
/// counts); then the result is independent of scheduling.
/// `fold(acc, replica_index, heights)`; `merge(into, from)`.
template <class Acc, class Fold, class Merge>
Acc reduce_replicas(const GreenOperator& green, const StreamKey& key, std::size_t replicas, const Acc& init,
                    Fold fold, Merge merge, const ReplicaOptions& opts = {}) {
    const std::size_t block = std::max<std::size_t>(1, opts.block);
    const std::size_t blocks = (replicas + block - 1) / block;
    unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(blocks, 1)));

    const FieldLayout& layout = green.layout();
    std::vector<std::size_t> grid_index(layout.size());
    for (std::size_t s = 0; s < layout.size(); ++s) grid_index[s] = layout.box.index(layout.active[s]);

    std::vector<Acc> partial(workers, init);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&](unsigned w) {
        std::vector<double> grid(layout.box.vertex_count(), 0.0);
        try {
            for (std::size_t b = next++; b < blocks; b = next++) {
                const std::size_t first = b * block;
                const std::size_t count = std::min(block, replicas - first);
                const Eigen::MatrixXd phi = sample_block(green, key, first, count);
                for (std::size_t j = 0; j < count; ++j) {
                    const double* col = phi.col(static_cast<Eigen::Index>(j)).data();
                    for (std::size_t s = 0; s < grid_index.size(); ++s) grid[grid_index[s]] = col[s];
                    fold(partial[w], static_cast<std::uint64_t>(first + j), std::span<const double>(grid));
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = blocks;
        }
    };

    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    Acc total = init;
    for (const Acc& p : partial) merge(total, p);
    return total;
}

}  // namespace gfflab
