#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ccq::detail {

// Runs fn(trial) for trial in [0, trials) on up to `threads` workers.
// Work is split by static striding so the assignment is deterministic;
// results must be written into per-trial slots by the callers. The first
// exception thrown by any worker is rethrown after all workers join.
template <typename Fn>
void parallel_for_trials(std::size_t trials, unsigned threads, Fn&& fn) {
    if (threads <= 1 || trials <= 1) {
        for (std::size_t t = 0; t < trials; ++t) fn(t);
        return;
    }
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(threads, trials));
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t t = w; t < trials; t += workers) fn(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace ccq::detail
