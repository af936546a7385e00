#ifndef LAB_PARALLEL_HPP
#define LAB_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace lab {

// Worker count: LAB_WORKERS env var if set, else hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("LAB_WORKERS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Splits [0,n) into a fixed number of chunks, evaluates each chunk sum on a
// worker, and accumulates the chunk results in index order. The chunk count
// is independent of the worker count, so the result is bitwise reproducible
// no matter how many threads run.
template <typename Fn>
double chunked_sum(std::size_t n, Fn&& chunk_fn, std::size_t n_chunks = 256) {
    if (n == 0) return 0.0;
    n_chunks = std::min(n_chunks, n);
    std::vector<double> partial(n_chunks, 0.0);
    auto run_chunk = [&](std::size_t c) {
        std::size_t lo = n * c / n_chunks;
        std::size_t hi = n * (c + 1) / n_chunks;
        partial[c] = chunk_fn(lo, hi);
    };

    unsigned workers = std::min<std::size_t>(worker_count(), n_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t c = w; c < n_chunks; c += workers) run_chunk(c);
            });
        }
        for (auto& t : pool) t.join();
    }

    double total = 0.0;
    for (double v : partial) total += v;
    return total;
}

// Max-reduction over [0,n); same fixed-chunk scheme as chunked_sum.
template <typename Fn>
double chunked_max(std::size_t n, Fn&& chunk_fn, std::size_t n_chunks = 256) {
    if (n == 0) return 0.0;
    n_chunks = std::min(n_chunks, n);
    std::vector<double> partial(n_chunks, 0.0);
    auto run_chunk = [&](std::size_t c) {
        std::size_t lo = n * c / n_chunks;
        std::size_t hi = n * (c + 1) / n_chunks;
        partial[c] = chunk_fn(lo, hi);
    };

    unsigned workers = std::min<std::size_t>(worker_count(), n_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t c = w; c < n_chunks; c += workers) run_chunk(c);
            });
        }
        for (auto& t : pool) t.join();
    }

    double best = partial[0];
    for (double v : partial) best = std::max(best, v);
    return best;
}

} // namespace lab

#endif
