#include "hessmfg/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace hessmfg {

namespace {
std::atomic<int> g_threads{1};
}

void set_threads(int n) { g_threads.store(n < 1 ? 1 : n); }
int threads() { return g_threads.load(); }

std::vector<std::pair<std::size_t, std::size_t>> fixed_blocks(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    if (n == 0) return blocks;
    const std::size_t nblocks = (n >= 512) ? 64 : 1;
    const std::size_t base = n / nblocks;
    const std::size_t rem = n % nblocks;
    std::size_t start = 0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::size_t len = base + (b < rem ? 1 : 0);
        blocks.emplace_back(start, start + len);
        start += len;
    }
    return blocks;
}

namespace {

// Run block_fn over each block, distributing blocks across up to `threads()`
// workers. Results vector is indexed by block so the caller can combine
// partial results in deterministic block order.
void run_blocks(const std::vector<std::pair<std::size_t, std::size_t>>& blocks,
                const std::function<void(std::size_t)>& block_fn) {
    const int nthreads = std::min<int>(threads(), static_cast<int>(blocks.size()));
    if (nthreads <= 1) {
        for (std::size_t b = 0; b < blocks.size(); ++b) block_fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t b = next.fetch_add(1);
                if (b >= blocks.size()) return;
                block_fn(b);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

double ordered_block_sum(std::size_t n, const std::function<double(std::size_t)>& f) {
    const auto blocks = fixed_blocks(n);
    std::vector<double> partial(blocks.size(), 0.0);
    run_blocks(blocks, [&](std::size_t b) {
        double s = 0.0;
        for (std::size_t i = blocks[b].first; i < blocks[b].second; ++i) s += f(i);
        partial[b] = s;
    });
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

void parallel_apply(std::size_t n,
                    const std::function<void(std::size_t, std::size_t)>& block_fn) {
    const auto blocks = fixed_blocks(n);
    run_blocks(blocks, [&](std::size_t b) { block_fn(blocks[b].first, blocks[b].second); });
}

}  // namespace hessmfg
