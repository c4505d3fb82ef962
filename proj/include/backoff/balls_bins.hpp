#pragma once

#include <cstdint>
#include <vector>

#include "backoff/rational.hpp"
#include "backoff/rng.hpp"

namespace backoff {

/// One balls-into-bins placement: how many balls landed in each bin.
struct Occupancy {
    std::vector<uint32_t> bin_counts;
    uint64_t n_balls = 0;
    uint64_t n_bins = 0;
};

/// Per-bin flags for "contains exactly one ball", plus their total.
struct SingletonIndicators {
    std::vector<bool> bits;
    uint64_t count = 0;
};

/// Drops n_balls balls into n_bins bins, each bin chosen uniformly and
/// independently from the stream.
Occupancy place_balls(uint64_t n_balls, uint64_t n_bins, RngStream stream);

SingletonIndicators singleton_indicators(const Occupancy& occ);

struct SampleStats {
    uint64_t trials = 0;
    double mean = 0.0;
    uint64_t min = 0;
    uint64_t max = 0;
    std::vector<uint32_t> per_trial;  // singleton count of each trial, in trial order
};

struct SimulateOptions {
    unsigned workers = 1;  // 0 = hardware concurrency
    /// Budget on trials * n_bins; guards against runaway sweep sizes.
    uint64_t max_cells = 1'000'000'000;
    bool keep_per_trial = true;
};

/// Singleton counts over independent placements; trial t draws from stream
/// (seed, t), so results do not depend on worker count or scheduling.
SampleStats simulate_singletons(uint64_t n_balls, uint64_t n_bins, uint64_t trials, uint64_t seed,
                                const SimulateOptions& opts = {});

inline constexpr uint64_t kDefaultEnumerationCap = 100'000'000;

/// Exact Pr[every bin in `bins` holds exactly one ball], by exhaustive
/// counting over all n_bins^n_balls equally likely placements. Placements are
/// grouped by occupancy vector and weighted by multinomial coefficients; the
/// result is identical to iterating raw placements one by one.
Rational enumerate_joint_singleton_prob(uint64_t n_balls, uint64_t n_bins,
                                        std::vector<uint64_t> bins,
                                        uint64_t cap = kDefaultEnumerationCap);

/// Exact distribution of the singleton count: entry k holds the number of
/// placements with exactly k singleton bins. Entries sum to n_bins^n_balls.
std::vector<mpz_class> singleton_count_distribution(uint64_t n_balls, uint64_t n_bins,
                                                    uint64_t cap = kDefaultEnumerationCap);

struct MgfSides {
    double lhs;  // E[prod_j e^(lambda I_j)], from exact placement counts
    double rhs;  // prod_j E[e^(lambda I_j)], from exact per-bin counts
};

/// Both sides of the moment-generating-function product inequality, each
/// evaluated from exact placement counts and converted to double at the end.
MgfSides enumerate_mgf_sides(uint64_t n_balls, uint64_t n_bins, double lambda,
                             uint64_t cap = kDefaultEnumerationCap);

}  // namespace backoff
