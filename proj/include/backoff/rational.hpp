#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>

namespace backoff {

/// Arbitrary-precision rational kept in lowest terms with a positive
/// denominator. Equality is therefore structural.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}  // NOLINT(google-explicit-constructor)
    Rational(long num, long den) : v_(num, den) { v_.canonicalize(); }
    Rational(mpz_class num, mpz_class den) : v_(std::move(num), std::move(den)) { v_.canonicalize(); }
    explicit Rational(mpz_class n) : v_(std::move(n)) {}

    mpz_class numerator() const { return v_.get_num(); }
    mpz_class denominator() const { return v_.get_den(); }

    double to_double() const { return v_.get_d(); }

    /// Renders as "p/q" (always with the denominator, e.g. "0/1", "1/2").
    std::string str() const { return v_.get_num().get_str() + "/" + v_.get_den().get_str(); }

    Rational pow(unsigned long e) const {
        mpz_class num, den;
        mpz_pow_ui(num.get_mpz_t(), v_.get_num().get_mpz_t(), e);
        mpz_pow_ui(den.get_mpz_t(), v_.get_den().get_mpz_t(), e);
        return Rational(std::move(num), std::move(den));
    }

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(a.v_ + b.v_); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(a.v_ - b.v_); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(a.v_ * b.v_); }
    friend Rational operator/(const Rational& a, const Rational& b) { return Rational(a.v_ / b.v_); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

private:
    explicit Rational(mpq_class q) : v_(std::move(q)) {}  // assumed canonical
    mpq_class v_;
};

/// b^e as an arbitrary-precision integer.
inline mpz_class ipow(uint64_t b, uint64_t e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), b, e);
    return r;
}

/// Falling factorial n (n-1) ... (n-k+1); 1 when k = 0, 0 when k > n.
inline mpz_class falling_factorial(uint64_t n, uint64_t k) {
    if (k > n) return 0;
    mpz_class r = 1;
    for (uint64_t i = 0; i < k; ++i) r *= mpz_class(static_cast<unsigned long>(n - i));
    return r;
}

}  // namespace backoff
