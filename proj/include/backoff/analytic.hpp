#pragma once

#include <cstdint>
#include <vector>

#include "backoff/rational.hpp"

namespace backoff {

struct BallsBinsParams {
    uint64_t n_balls = 1;  // N
    uint64_t n_bins = 1;   // B
};

/// Where (N, B) sits relative to the two workable bands: `above` means
/// B >= N + sqrt(N), `below` means B <= N - sqrt(N), `gap` is neither.
enum class Regime { above, below, gap };

const char* to_string(Regime r);

/// Exact integer classification; no floating-point square roots, so the
/// boundary cases (perfect-square N with B = N +- sqrt(N)) land correctly.
Regime classify_regime(BallsBinsParams p);

/// Probability that bin j+1 is a singleton given bins 1..j are singletons:
/// (N-j) * 1/(B-j) * (1 - 1/(B-j))^(N-j-1) for j < min(B,N), and 0 for
/// j >= N (every ball already placed). Evaluated in log space.
double cond_prob_pj(BallsBinsParams p, uint64_t j);

/// Same quantity as an exact rational; for cross-checking the real path at
/// small scale and for the exact subset-product comparisons.
Rational cond_prob_pj_exact(BallsBinsParams p, uint64_t j);

/// cond_prob_pj(j) / cond_prob_pj(j+1), as a difference of logs.
/// Throws DegenerateRatioError when the denominator is exactly zero.
double pj_ratio_direct(BallsBinsParams p, uint64_t j);

/// The same ratio through its algebraic expansion
///   1 + (y^2 - a)/((a+y)^2 (a-1)) + binomial tail,
/// with a = N - j and y = B - N; the tail is summed with compensated
/// summation. Agrees with pj_ratio_direct to ~1e-12 relative.
double pj_ratio_expansion(BallsBinsParams p, uint64_t j);

struct MonotoneVerdict {
    bool monotone = true;
    uint64_t violated_at = 0;  // first offending j; meaningful when !monotone
};

/// Checks P_j >= P_{j+1} - rel_tol * P_j over j = 0 .. min(B,N)-2.
MonotoneVerdict check_pj_monotone(BallsBinsParams p, double rel_tol = 1e-12);

/// Exact probability that s designated bins are all singletons:
/// N (N-1) ... (N-s+1) * (B-s)^(N-s) / B^N, which telescopes the chain of
/// conditional probabilities. Returns 0 when s > N.
Rational joint_singleton_prob_closed(BallsBinsParams p, uint64_t s);

struct PropertyCheck {
    uint64_t subset_size = 0;
    Rational joint;          // exact joint probability for a size-s subset
    Rational product_bound;  // (per-bin singleton probability)^s
    bool holds = false;      // joint <= product_bound
};

/// Exact subset-product checks for s = 1 .. max_s. Bins are exchangeable, so
/// one canonical subset per size covers all subsets of that size.
std::vector<PropertyCheck> check_property1(BallsBinsParams p, uint64_t max_s);

/// N * (1 - 1/B)^(N-1), in log space.
double expected_singletons(BallsBinsParams p);

/// exp(-eps^2 * mean / 3): bound on Pr[X > (1+eps) mean].
double chernoff_upper_tail(double epsilon, double mean);

/// exp(-eps^2 * mean / 2): bound on Pr[X < (1-eps) mean].
double chernoff_lower_tail(double epsilon, double mean);

enum class BoundSide { lower, upper };

struct ConcentrationBound {
    double threshold = 0.0;     // singleton-count threshold
    double failure_prob = 0.0;  // probability the bound is missed
    BoundSide side = BoundSide::lower;
    double epsilon = 0.0;
};

struct SingletonBounds {
    ConcentrationBound lower;
    ConcentrationBound upper;
};

/// Concentration bounds on the singleton count:
///   lower: >= (1-eps) N / e^(N/(B-1))   w.p. >= 1 - exp(-eps^2 N / (2 e^(N/(B-1))))
///   upper: <= (1+eps) N / e^((N-1)/B)   w.p. >= 1 - exp(-eps^2 N / (3 e^(N/(B-1))))
/// Throws RegimeError when (N, B) falls in the gap band.
SingletonBounds singleton_bounds(BallsBinsParams p, double epsilon);

/// sqrt(4 e ln n) / n^(1/3): the epsilon schedule behind the per-window
/// recursion bounds.
double default_recursion_epsilon(uint64_t n);

/// sqrt(4 e ln^2 n / n): the epsilon schedule used for the log-log window
/// analysis.
double default_llb_epsilon(uint64_t n);

}  // namespace backoff
