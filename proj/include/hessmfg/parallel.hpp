#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace hessmfg {

// Global worker-thread count (>= 1). Thread count must never change results:
// every reduction below uses a fixed block partition that depends only on the
// problem size, with partial sums combined in block-index order.
void set_threads(int n);
int threads();

// Partition [0, n) into a fixed number of contiguous blocks. Exactly 64 blocks
// when n >= 512, otherwise a single block; independent of the thread count.
std::vector<std::pair<std::size_t, std::size_t>> fixed_blocks(std::size_t n);

// Sum f(i) for i in [0, n). Each block is summed left to right; block partial
// sums are added in block order. Bit-identical for any thread count.
double ordered_block_sum(std::size_t n, const std::function<double(std::size_t)>& f);

// Apply f(i) for all i in [0, n), blocks possibly on different threads.
// f must write only to slot i of its outputs (pure gather maps qualify).
void parallel_apply(std::size_t n, const std::function<void(std::size_t, std::size_t)>& block_fn);

}  // namespace hessmfg
