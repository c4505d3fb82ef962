#pragma once

// Test-only oracles: raw iteration over every one of the B^N equally likely
// placements, one at a time. Deliberately independent of the library's
// multinomial-grouped enumeration (and much slower); used to validate it and
// the closed forms at small sizes.

#include <algorithm>
#include <cstdint>
#include <vector>

namespace oracle {

// Calls visit(occupancy) once per raw placement, B^N times in total.
template <typename Visit>
void for_each_placement(uint64_t n_balls, uint64_t n_bins, Visit visit) {
    std::vector<uint32_t> choice(n_balls, 0);  // ball -> bin
    std::vector<uint32_t> occ(n_bins, 0);
    for (;;) {
        std::fill(occ.begin(), occ.end(), 0);
        for (uint32_t c : choice) ++occ[c];
        visit(occ);
        size_t i = 0;
        while (i < n_balls) {
            if (++choice[i] < n_bins) break;
            choice[i] = 0;
            ++i;
        }
        if (i == n_balls) return;
    }
}

// Placements where every bin in `subset` holds exactly one ball.
inline uint64_t count_joint_singleton(uint64_t n_balls, uint64_t n_bins,
                                      const std::vector<uint64_t>& subset) {
    uint64_t hits = 0;
    for_each_placement(n_balls, n_bins, [&](const std::vector<uint32_t>& occ) {
        hits += std::all_of(subset.begin(), subset.end(), [&](uint64_t b) { return occ[b] == 1; });
    });
    return hits;
}

// Placement counts by singleton count: entry k = #placements with k singletons.
inline std::vector<uint64_t> singleton_distribution(uint64_t n_balls, uint64_t n_bins) {
    std::vector<uint64_t> dist(std::min(n_balls, n_bins) + 1, 0);
    for_each_placement(n_balls, n_bins, [&](const std::vector<uint32_t>& occ) {
        uint64_t singles = 0;
        for (uint32_t c : occ) singles += c == 1;
        ++dist[singles];
    });
    return dist;
}

// Placements where all balls land in distinct bins.
inline uint64_t count_all_distinct(uint64_t n_balls, uint64_t n_bins) {
    uint64_t hits = 0;
    for_each_placement(n_balls, n_bins, [&](const std::vector<uint32_t>& occ) {
        hits += std::all_of(occ.begin(), occ.end(), [](uint32_t c) { return c <= 1; });
    });
    return hits;
}

inline uint64_t total_placements(uint64_t n_balls, uint64_t n_bins) {
    uint64_t total = 1;
    for (uint64_t i = 0; i < n_balls; ++i) total *= n_bins;
    return total;
}

}  // namespace oracle
