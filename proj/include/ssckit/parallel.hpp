// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace ssc {

/// Runs fn(begin, end) over a static partition of [0, n) using `threads`
/// workers. Chunks are contiguous and assigned by chunk index, so any
/// per-chunk results merged in chunk order reproduce the single-thread
/// result bit for bit.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t nt =
        std::min<std::size_t>(threads < 1 ? 1 : static_cast<std::size_t>(threads), n);
    if (nt <= 1) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + nt - 1) / nt;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace ssc
