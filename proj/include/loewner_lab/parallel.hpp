#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <random>
#include <thread>
#include <vector>

namespace llab {

/// requested > 0 wins, then LOEWNER_LAB_THREADS, then the hardware count.
int resolve_threads(int requested);

/// Independent stream for sample `index` of a run seeded with `seed`.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedu};
    return std::mt19937_64(seq);
}

/// f(i) for i in [0, n), split in contiguous blocks. f must only write to its own slot.
template <class F>
void parallel_for(long n, int threads, F&& f) {
    int t = resolve_threads(threads);
    if (t <= 1 || n < 2) {
        for (long i = 0; i < n; ++i) f(i);
        return;
    }
    t = static_cast<int>(std::min<long>(t, n));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
    for (int w = 0; w < t; ++w) {
        long lo = n * w / t, hi = n * (w + 1) / t;
        pool.emplace_back([lo, hi, &f, &err = errors[static_cast<std::size_t>(w)]] {
            try {
                for (long i = lo; i < hi; ++i) f(i);
            } catch (...) {
                err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace llab
