#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace levyhedge::detail {

/// Contiguous path ranges with disjoint writes; worker exceptions are
/// rethrown in worker order so failures are reproducible.
template <typename Fn>
void parallel_paths(int n_paths, int threads, Fn&& fn) {
    const int n_workers = std::max(1, std::min(threads, n_paths));
    if (n_workers == 1) {
        fn(0, n_paths);
        return;
    }
    const int chunk = (n_paths + n_workers - 1) / n_workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_workers));
    std::vector<std::thread> pool;
    for (int worker = 0; worker < n_workers; ++worker) {
        const int lo = worker * chunk;
        const int hi = std::min(n_paths, lo + chunk);
        pool.emplace_back([&fn, &errors, worker, lo, hi] {
            try {
                fn(lo, hi);
            } catch (...) {
                errors[static_cast<std::size_t>(worker)] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace levyhedge::detail
