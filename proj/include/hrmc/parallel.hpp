#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "hrmc/types.hpp"

namespace hrmc {

/// Runs f(i) for every i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). f must only write state owned by index i, so results do not
/// depend on scheduling.
inline void parallel_for(Index n, Index threads,
                         const std::function<void(Index)>& f) {
    if (threads <= 0)
        threads = static_cast<Index>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (threads == 1 || n <= 1) {
        for (Index i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<Index> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (!failed.load()) {
            Index i = next.fetch_add(1);
            if (i >= n) break;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    Index count = std::min<Index>(threads, n);
    pool.reserve(static_cast<std::size_t>(count));
    for (Index t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace hrmc
