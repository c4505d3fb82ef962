#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace backoff::detail {

inline unsigned resolve_workers(unsigned workers, uint64_t trials) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<uint64_t>(workers, trials));
}

/// Static split of [0, trials) into contiguous chunks, one per worker. Each
/// chunk writes only its own output slots, so results do not depend on the
/// worker count or on scheduling.
template <typename Fn>
void for_each_chunk(uint64_t trials, unsigned workers, Fn fn) {
    workers = resolve_workers(workers, trials);
    if (workers <= 1) {
        fn(0u, uint64_t{0}, trials);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const uint64_t chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const uint64_t lo = w * chunk;
        const uint64_t hi = std::min(trials, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([=] { fn(w, lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace backoff::detail
