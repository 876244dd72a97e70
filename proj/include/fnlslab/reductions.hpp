#pragma once

#include <atomic>
#include <complex>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace fnls {

// Process-wide worker budget for parallelizable sums (set from --jobs).
// Results never depend on it: work is partitioned by index, not by thread.
inline std::atomic<int> global_jobs{1};

// Run work(0..count-1), each index exactly once, on up to `jobs` threads.
// Work bodies must not throw.
inline void parallel_indexed(int count, const std::function<void(int)>& work) {
    const int jobs = std::min(global_jobs.load(), count);
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
        });
    for (std::thread& th : pool) th.join();
}

// Pairwise (binary-tree) sum: a fixed association order, so the result is a
// pure function of the input sequence — bit-stable across thread counts.
inline std::complex<double> pairwise_sum(std::span<const std::complex<double>> v) {
    if (v.size() <= 8) {
        std::complex<double> s{0.0, 0.0};
        for (const auto& x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_sum_real(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum_real(v.subspan(0, half)) + pairwise_sum_real(v.subspan(half));
}

} // namespace fnls
