#include "backoff/balls_bins.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "backoff/detail/parallel.hpp"
#include "backoff/errors.hpp"

namespace backoff {

namespace {

void validate_positive(uint64_t n_balls, uint64_t n_bins) {
    if (n_balls < 1) throw DomainError("n_balls must be >= 1");
    if (n_bins < 1) throw DomainError("n_bins must be >= 1");
}

// Checks B^N <= cap without overflow.
bool within_cap(uint64_t n_balls, uint64_t n_bins, uint64_t cap) {
    unsigned __int128 total = 1;
    for (uint64_t i = 0; i < n_balls; ++i) {
        if (total > cap) return false;
        total *= n_bins;
    }
    return total <= cap;
}

void require_cap(uint64_t n_balls, uint64_t n_bins, uint64_t cap) {
    if (within_cap(n_balls, n_bins, cap)) return;
    mpz_class required = ipow(n_bins, n_balls);
    throw CapExceededError("enumeration of " + std::to_string(n_bins) + "^" +
                           std::to_string(n_balls) + " placements requires cap >= " +
                           required.get_str() + " (configured cap " + std::to_string(cap) + ")");
}

// Visits every occupancy vector (c_0, ..., c_{B-1}) with sum N along with its
// multinomial weight N! / prod(c_i!): the number of raw placements that
// collapse onto it. The visitor receives the full occupancy.
void visit_occupancies(uint64_t n_balls, uint64_t n_bins,
                       const std::function<void(const std::vector<uint32_t>&, const mpz_class&)>& visit) {
    std::vector<mpz_class> factorial(n_balls + 1);
    factorial[0] = 1;
    for (uint64_t i = 1; i <= n_balls; ++i) factorial[i] = factorial[i - 1] * mpz_class(static_cast<unsigned long>(i));

    std::vector<uint32_t> occ(n_bins, 0);
    mpz_class weight;
    // Recursion over bins with the running remainder of balls.
    auto rec = [&](auto&& self, uint64_t bin, uint64_t remaining, const mpz_class& denom) -> void {
        if (bin + 1 == n_bins) {
            occ[bin] = static_cast<uint32_t>(remaining);
            weight = factorial[n_balls] / (denom * factorial[remaining]);
            visit(occ, weight);
            return;
        }
        for (uint64_t c = 0; c <= remaining; ++c) {
            occ[bin] = static_cast<uint32_t>(c);
            self(self, bin + 1, remaining - c, denom * factorial[c]);
        }
    };
    rec(rec, 0, n_balls, mpz_class(1));
}

}  // namespace

Occupancy place_balls(uint64_t n_balls, uint64_t n_bins, RngStream stream) {
    validate_positive(n_balls, n_bins);
    Occupancy occ;
    occ.n_balls = n_balls;
    occ.n_bins = n_bins;
    occ.bin_counts.assign(n_bins, 0);
    Rng rng(stream);
    for (uint64_t i = 0; i < n_balls; ++i) occ.bin_counts[rng.below(n_bins)]++;
    return occ;
}

SingletonIndicators singleton_indicators(const Occupancy& occ) {
    SingletonIndicators out;
    out.bits.resize(occ.bin_counts.size());
    for (size_t j = 0; j < occ.bin_counts.size(); ++j) {
        const bool single = occ.bin_counts[j] == 1;
        out.bits[j] = single;
        out.count += single;
    }
    return out;
}

SampleStats simulate_singletons(uint64_t n_balls, uint64_t n_bins, uint64_t trials, uint64_t seed,
                                const SimulateOptions& opts) {
    validate_positive(n_balls, n_bins);
    if (trials < 1) throw DomainError("trials must be >= 1");
    if (trials > opts.max_cells / n_bins)
        throw ResourceError("trials * n_bins = " + std::to_string(trials) + " * " +
                            std::to_string(n_bins) + " exceeds the memory budget of " +
                            std::to_string(opts.max_cells) +
                            " cells; raise SimulateOptions::max_cells");

    std::vector<uint32_t> per_trial(trials);
    detail::for_each_chunk(trials, opts.workers, [&](unsigned, uint64_t lo, uint64_t hi) {
        std::vector<uint32_t> counts;
        for (uint64_t t = lo; t < hi; ++t) {
            counts.assign(n_bins, 0);
            Rng rng(seed, t);
            uint64_t singles = 0;
            for (uint64_t i = 0; i < n_balls; ++i) {
                const uint32_t c = ++counts[rng.below(n_bins)];
                if (c == 1)
                    ++singles;
                else if (c == 2)
                    --singles;
            }
            per_trial[t] = static_cast<uint32_t>(singles);
        }
    });

    SampleStats stats;
    stats.trials = trials;
    stats.min = per_trial[0];
    stats.max = per_trial[0];
    uint64_t sum = 0;
    for (uint32_t c : per_trial) {
        sum += c;
        stats.min = std::min<uint64_t>(stats.min, c);
        stats.max = std::max<uint64_t>(stats.max, c);
    }
    stats.mean = static_cast<double>(sum) / static_cast<double>(trials);
    if (opts.keep_per_trial) stats.per_trial = std::move(per_trial);
    return stats;
}

Rational enumerate_joint_singleton_prob(uint64_t n_balls, uint64_t n_bins,
                                        std::vector<uint64_t> bins, uint64_t cap) {
    validate_positive(n_balls, n_bins);
    require_cap(n_balls, n_bins, cap);
    std::sort(bins.begin(), bins.end());
    if (std::adjacent_find(bins.begin(), bins.end()) != bins.end())
        throw DomainError("subset contains a repeated bin index");
    if (!bins.empty() && bins.back() >= n_bins)
        throw DomainError("subset bin index " + std::to_string(bins.back()) +
                          " out of range for " + std::to_string(n_bins) + " bins");

    mpz_class favorable = 0;
    visit_occupancies(n_balls, n_bins, [&](const std::vector<uint32_t>& occ, const mpz_class& weight) {
        for (uint64_t b : bins)
            if (occ[b] != 1) return;
        favorable += weight;
    });
    return {favorable, ipow(n_bins, n_balls)};
}

std::vector<mpz_class> singleton_count_distribution(uint64_t n_balls, uint64_t n_bins,
                                                    uint64_t cap) {
    validate_positive(n_balls, n_bins);
    require_cap(n_balls, n_bins, cap);
    std::vector<mpz_class> dist(std::min(n_balls, n_bins) + 1);
    visit_occupancies(n_balls, n_bins, [&](const std::vector<uint32_t>& occ, const mpz_class& weight) {
        size_t singles = 0;
        for (uint32_t c : occ) singles += c == 1;
        dist[singles] += weight;
    });
    return dist;
}

MgfSides enumerate_mgf_sides(uint64_t n_balls, uint64_t n_bins, double lambda, uint64_t cap) {
    if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
    validate_positive(n_balls, n_bins);
    require_cap(n_balls, n_bins, cap);

    mpz_class bin0_singleton = 0;  // placements where bin 0 holds exactly one ball
    std::vector<mpz_class> dist(std::min(n_balls, n_bins) + 1);
    visit_occupancies(n_balls, n_bins, [&](const std::vector<uint32_t>& occ, const mpz_class& weight) {
        size_t singles = 0;
        for (uint32_t c : occ) singles += c == 1;
        dist[singles] += weight;
        if (occ[0] == 1) bin0_singleton += weight;
    });

    const double total = ipow(n_bins, n_balls).get_d();
    double lhs = 0.0;
    for (size_t k = 0; k < dist.size(); ++k)
        lhs += dist[k].get_d() / total * std::exp(lambda * static_cast<double>(k));

    // Bins are exchangeable, so E[e^(lambda I_j)] is the same for every j.
    const double p_single = bin0_singleton.get_d() / total;
    const double rhs = std::pow(1.0 + p_single * std::expm1(lambda), static_cast<double>(n_bins));
    return {lhs, rhs};
}

}  // namespace backoff
