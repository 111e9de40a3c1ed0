#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bifsim {

/// Worker count: BIFSIM_THREADS if set, else hardware concurrency.
std::size_t worker_count();

/// Evaluates fn(i) for i in [0, n) on up to worker_count() threads and
/// returns the results in index order, so any later reduction is
/// independent of scheduling. The first exception thrown is rethrown.
template <class R, class Fn>
std::vector<R> run_trials(std::size_t n, Fn&& fn, std::size_t workers = 0) {
    std::vector<R> out(n);
    if (workers == 0) workers = worker_count();
    workers = std::max<std::size_t>(1, std::min(workers, n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

} // namespace bifsim
