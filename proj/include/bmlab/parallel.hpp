#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace bmlab {

// Global worker-count knob (set from the CLI --threads flag). Work is always
// partitioned by index, and reductions happen in index order afterwards, so
// results are identical for any thread count.
inline int& worker_threads() {
    static int n = 1;
    return n;
}

// Runs fn(begin, end) on contiguous index blocks, one block per worker.
// Callers keep per-block scratch inside fn; outputs must be written to
// disjoint per-index slots.
template <typename Fn>
void parallel_blocks(std::size_t count, Fn&& fn) {
    const int requested = worker_threads();
    if (requested <= 1 || count < 2) {
        if (count > 0) fn(std::size_t{0}, count);
        return;
    }
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(requested), count);
    std::vector<std::thread> pool;
    pool.reserve(k);
    const std::size_t base = count / k, extra = count % k;
    std::size_t begin = 0;
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t end = begin + base + (t < extra ? 1 : 0);
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
        begin = end;
    }
    for (auto& th : pool) th.join();
}

}  // namespace bmlab
