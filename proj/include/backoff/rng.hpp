#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace backoff {

/// Descriptor for a reproducible random stream. Identical (seed, stream_id)
/// pairs yield identical draw sequences on every platform: the engine is the
/// standardized mt19937_64 and bounded draws avoid implementation-defined
/// library distributions.
struct RngStream {
    uint64_t seed = 0;
    uint64_t stream_id = 0;
};

namespace detail {
// splitmix64 finalizer, used to spread (seed, stream_id) into engine state.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic generator with unbiased bounded draws.
class Rng {
public:
    explicit Rng(RngStream s) : gen_(detail::mix64(detail::mix64(s.seed) + s.stream_id)) {}
    Rng(uint64_t seed, uint64_t stream_id) : Rng(RngStream{seed, stream_id}) {}

    uint64_t next() { return gen_(); }

    /// Uniform draw from {0, ..., bound-1}. Masks down to the next power of
    /// two and rejects out-of-range values, so every residue is exactly
    /// equally likely. bound == 1 returns 0 without consuming the stream.
    uint64_t below(uint64_t bound) {
        if (bound <= 1) return 0;
        const uint64_t mask = ~uint64_t{0} >> std::countl_zero(bound - 1);
        for (;;) {
            const uint64_t r = gen_() & mask;
            if (r < bound) return r;
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace backoff
