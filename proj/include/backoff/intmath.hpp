#pragma once

#include <cmath>
#include <cstdint>

namespace backoff {

/// Exact integer floor(sqrt(n)).
inline uint64_t floor_sqrt(uint64_t n) {
    if (n == 0) return 0;
    auto r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
    // sqrt on the double rounding boundary can be off by one in either direction
    while (r > 0 && r > n / r) --r;
    while ((r + 1) <= n / (r + 1)) ++r;
    return r;
}

/// Exact integer ceil(sqrt(n)).
inline uint64_t ceil_sqrt(uint64_t n) {
    const uint64_t r = floor_sqrt(n);
    return r * r == n ? r : r + 1;
}

/// True iff w >= n + sqrt(n), decided in exact integer arithmetic.
inline bool at_least_n_plus_sqrt(uint64_t w, uint64_t n) {
    if (w <= n) return n == 0;
    const unsigned __int128 d = w - n;
    return d * d >= n;
}

/// True iff b <= n - sqrt(n), decided in exact integer arithmetic.
inline bool at_most_n_minus_sqrt(uint64_t b, uint64_t n) {
    if (b >= n) return false;
    const unsigned __int128 d = n - b;
    return d * d >= n;
}

/// Smallest t >= 0 with 2^(2^t) >= w: the exact value of ceil(lg lg w) for
/// w >= 2 (and 0 for w <= 2 by convention).
inline uint32_t ceil_lg_lg(uint64_t w) {
    uint32_t t = 0;
    unsigned __int128 p = 2;
    while (p < w) {
        p *= p;
        ++t;
    }
    return t;
}

}  // namespace backoff
