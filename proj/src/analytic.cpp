#include "backoff/analytic.hpp"

#include <cmath>
#include <string>

#include "backoff/errors.hpp"
#include "backoff/intmath.hpp"

namespace backoff {

namespace {

void validate(BallsBinsParams p) {
    if (p.n_balls < 1 || p.n_bins < 1) throw DomainError("N and B must be >= 1");
}

// log of (N-j) * 1/(B-j) * (1 - 1/(B-j))^(N-j-1), or -inf when the value is 0.
double log_cond_prob(uint64_t n, uint64_t b, uint64_t j) {
    const double balls_left = static_cast<double>(n - j);
    const uint64_t bins_left = b - j;
    const uint64_t exponent = n - j - 1;
    if (bins_left == 1)  // (1 - 1/1)^e: 1 when e = 0, else 0
        return exponent == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return std::log(balls_left) - std::log(static_cast<double>(bins_left)) +
           static_cast<double>(exponent) * std::log1p(-1.0 / static_cast<double>(bins_left));
}

}  // namespace

const char* to_string(Regime r) {
    switch (r) {
        case Regime::above: return "above";
        case Regime::below: return "below";
        case Regime::gap: return "gap";
    }
    return "?";
}

Regime classify_regime(BallsBinsParams p) {
    validate(p);
    if (at_least_n_plus_sqrt(p.n_bins, p.n_balls)) return Regime::above;
    if (at_most_n_minus_sqrt(p.n_bins, p.n_balls)) return Regime::below;
    return Regime::gap;
}

double cond_prob_pj(BallsBinsParams p, uint64_t j) {
    validate(p);
    if (j >= p.n_bins) throw DomainError("j must satisfy 0 <= j <= B-1");
    if (j >= p.n_balls) return 0.0;  // every ball already placed
    return std::exp(log_cond_prob(p.n_balls, p.n_bins, j));
}

Rational cond_prob_pj_exact(BallsBinsParams p, uint64_t j) {
    validate(p);
    if (j >= p.n_bins) throw DomainError("j must satisfy 0 <= j <= B-1");
    if (j >= p.n_balls) return 0;
    const uint64_t bins_left = p.n_bins - j;
    const uint64_t exponent = p.n_balls - j - 1;
    mpz_class num = mpz_class(static_cast<unsigned long>(p.n_balls - j)) * ipow(bins_left - 1, exponent);
    return {std::move(num), ipow(bins_left, exponent + 1)};
}

double pj_ratio_direct(BallsBinsParams p, uint64_t j) {
    validate(p);
    const uint64_t m = std::min(p.n_balls, p.n_bins);
    if (m < 2 || j > m - 2) throw DomainError("j must satisfy 0 <= j <= min(B,N)-2");
    const double log_next = log_cond_prob(p.n_balls, p.n_bins, j + 1);
    if (std::isinf(log_next))
        throw DegenerateRatioError("P_(j+1) is exactly 0; the ratio is undefined");
    return std::exp(log_cond_prob(p.n_balls, p.n_bins, j) - log_next);
}

double pj_ratio_expansion(BallsBinsParams p, uint64_t j) {
    validate(p);
    const uint64_t m = std::min(p.n_balls, p.n_bins);
    if (m < 2 || j > m - 2) throw DomainError("j must satisfy 0 <= j <= min(B,N)-2");
    const uint64_t a_int = p.n_balls - j;
    if (a_int < 2) throw DomainError("expansion requires N - j >= 2");
    const int64_t y_int = static_cast<int64_t>(p.n_bins) - static_cast<int64_t>(p.n_balls);

    const double a = static_cast<double>(a_int);
    const double y = static_cast<double>(y_int);
    const double ay = a + y;  // = B - j >= 2

    if (ay == 2.0 && a_int >= 3)
        throw DegenerateRatioError("P_(j+1) is exactly 0; the ratio is undefined");

    const double second = (y * y - a) / (ay * ay * (a - 1.0));

    double third = 0.0;
    if (a_int >= 3) {
        // sum_{k=2}^{a-1} C(a-1, k) q^k, built iteratively with Kahan summation
        const double q = 1.0 / (ay * (ay - 2.0));
        double term = (a - 1.0) * (a - 2.0) / 2.0 * q * q;  // k = 2
        double sum = 0.0, carry = 0.0;
        for (uint64_t k = 2; k < a_int; ++k) {
            const double adj = term - carry;
            const double next = sum + adj;
            carry = (next - sum) - adj;
            sum = next;
            term *= (a - 1.0 - static_cast<double>(k)) / static_cast<double>(k + 1) * q;
        }
        const double denom = (a - 1.0) * ay / (a * (ay - 2.0));
        third = sum / denom;
    }
    return 1.0 + second + third;
}

MonotoneVerdict check_pj_monotone(BallsBinsParams p, double rel_tol) {
    validate(p);
    const uint64_t m = std::min(p.n_balls, p.n_bins);
    double prev = cond_prob_pj(p, 0);
    for (uint64_t j = 0; j + 2 <= m; ++j) {
        const double next = cond_prob_pj(p, j + 1);
        if (prev < next - rel_tol * prev) return {false, j};
        prev = next;
    }
    return {true, 0};
}

Rational joint_singleton_prob_closed(BallsBinsParams p, uint64_t s) {
    validate(p);
    if (s < 1 || s > p.n_bins) throw DomainError("s must satisfy 1 <= s <= B");
    if (s > p.n_balls) return 0;  // more designated bins than balls
    mpz_class num = falling_factorial(p.n_balls, s) * ipow(p.n_bins - s, p.n_balls - s);
    return {std::move(num), ipow(p.n_bins, p.n_balls)};
}

std::vector<PropertyCheck> check_property1(BallsBinsParams p, uint64_t max_s) {
    validate(p);
    if (max_s < 1 || max_s > p.n_bins) throw DomainError("max_s must satisfy 1 <= max_s <= B");
    const Rational p0 = cond_prob_pj_exact(p, 0);
    std::vector<PropertyCheck> checks;
    checks.reserve(max_s);
    Rational bound = 1;
    for (uint64_t s = 1; s <= max_s; ++s) {
        bound = bound * p0;
        PropertyCheck c;
        c.subset_size = s;
        c.joint = joint_singleton_prob_closed(p, s);
        c.product_bound = bound;
        c.holds = c.joint <= c.product_bound;
        checks.push_back(std::move(c));
    }
    return checks;
}

double expected_singletons(BallsBinsParams p) {
    validate(p);
    if (p.n_bins == 1) return p.n_balls == 1 ? 1.0 : 0.0;
    return std::exp(std::log(static_cast<double>(p.n_balls)) +
                    static_cast<double>(p.n_balls - 1) * std::log1p(-1.0 / static_cast<double>(p.n_bins)));
}

namespace {
void validate_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
}
}  // namespace

double chernoff_upper_tail(double epsilon, double mean) {
    validate_epsilon(epsilon);
    if (!(mean > 0.0)) throw DomainError("mean must be positive");
    return std::exp(-epsilon * epsilon * mean / 3.0);
}

double chernoff_lower_tail(double epsilon, double mean) {
    validate_epsilon(epsilon);
    if (!(mean > 0.0)) throw DomainError("mean must be positive");
    return std::exp(-epsilon * epsilon * mean / 2.0);
}

SingletonBounds singleton_bounds(BallsBinsParams p, double epsilon) {
    validate_epsilon(epsilon);
    if (classify_regime(p) == Regime::gap)
        throw RegimeError("(N=" + std::to_string(p.n_balls) + ", B=" + std::to_string(p.n_bins) +
                          ") falls in the gap band; the concentration bounds need B >= N+sqrt(N) "
                          "or B <= N-sqrt(N)");
    const double n = static_cast<double>(p.n_balls);
    const double b = static_cast<double>(p.n_bins);
    const double shrink = std::exp(n / (b - 1.0));

    SingletonBounds out;
    out.lower = {(1.0 - epsilon) * n / shrink, std::exp(-epsilon * epsilon * n / (2.0 * shrink)),
                 BoundSide::lower, epsilon};
    out.upper = {(1.0 + epsilon) * n / std::exp((n - 1.0) / b),
                 std::exp(-epsilon * epsilon * n / (3.0 * shrink)), BoundSide::upper, epsilon};
    return out;
}

double default_recursion_epsilon(uint64_t n) {
    const double nn = static_cast<double>(n);
    return std::sqrt(4.0 * M_E * std::log(nn)) / std::cbrt(nn);
}

double default_llb_epsilon(uint64_t n) {
    const double nn = static_cast<double>(n);
    const double ln = std::log(nn);
    return std::sqrt(4.0 * M_E * ln * ln / nn);
}

}  // namespace backoff
