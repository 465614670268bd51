#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace nk {

// Fixed Monte Carlo chunk size.  Chunk c always draws from
// StreamRng(seed, c) and the per-chunk results are reduced in index order,
// so output depends only on (seed, n_samples) — never on the worker count.
// Changing this constant changes which stream serves which sample, and
// therefore the sampled values for a given seed; treat it as part of the
// seeding contract.
inline constexpr std::uint64_t kMcChunk = std::uint64_t{1} << 16;

// Mean/variance accumulator for scalar Monte Carlo sums.
struct MeanAccumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t n = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    MeanAccumulator& operator+=(const MeanAccumulator& other) {
        sum += other.sum;
        sum_sq += other.sum_sq;
        n += other.n;
        return *this;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double std_error() const {
        if (n < 2) return 0.0;
        double var = (sum_sq - sum * sum / static_cast<double>(n)) /
                     static_cast<double>(n - 1);
        if (var < 0.0) var = 0.0; // guard fp cancellation
        return std::sqrt(var / static_cast<double>(n));
    }
};

// Runs fn(chunk_index, samples_in_chunk, accumulator&) over
// ceil(n_samples/kMcChunk) chunks spread across `jobs` workers (jobs <= 0
// means hardware concurrency), then folds the per-chunk accumulators in
// chunk order.  Acc needs a default constructor and operator+=.  fn must
// not throw: chunk bodies run on plain worker threads.
template <typename Acc, typename Fn>
Acc mc_accumulate(std::uint64_t n_samples, int jobs, Fn&& fn) {
    Acc total{};
    if (n_samples == 0) return total;
    const std::uint64_t n_chunks = (n_samples + kMcChunk - 1) / kMcChunk;
    std::vector<Acc> partial(n_chunks);

    auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t begin = c * kMcChunk;
        const std::uint64_t count = std::min(kMcChunk, n_samples - begin);
        fn(c, count, partial[c]);
    };

    unsigned workers;
    if (jobs > 0) {
        workers = static_cast<unsigned>(jobs);
    } else {
        workers = std::thread::hardware_concurrency();
        if (workers == 0) workers = 1;
    }
    if (workers > n_chunks) workers = static_cast<unsigned>(n_chunks);

    if (workers <= 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::uint64_t c = next.fetch_add(1); c < n_chunks;
                     c = next.fetch_add(1)) {
                    run_chunk(c);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    for (const auto& acc : partial) total += acc;
    return total;
}

} // namespace nk
