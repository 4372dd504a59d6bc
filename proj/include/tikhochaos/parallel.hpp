#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

namespace tikhochaos {

/// Worker count from CHAOS_THREADS, else the hardware concurrency (>= 1).
int worker_count();

/// Runs fn(i) for every i in [0, n). Items are claimed in `order` (identity
/// when empty); results must be written to position-keyed storage. The first
/// exception by item position is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, const std::vector<std::size_t>& order = {}, int threads = 0) {
    std::vector<std::size_t> sequence = order;
    if (sequence.empty()) {
        sequence.resize(n);
        std::iota(sequence.begin(), sequence.end(), std::size_t{0});
    } else {
        std::vector<std::size_t> sorted = sequence;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i)
            if (sorted[i] != i || sorted.size() != n) throw std::invalid_argument("execution order must be a permutation");
    }

    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            const std::size_t i = sequence[k];
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const auto workers = static_cast<std::size_t>(std::max(1, threads > 0 ? threads : worker_count()));
    if (workers == 1 || n <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(work);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace tikhochaos
