#pragma once

#include <gmpxx.h>

#include <string>

namespace stegomark {

// Inclusive interval [lo, hi] of non-negative integers, arbitrary width.
struct NatRange {
    mpz_class lo;
    mpz_class hi;

    NatRange() : lo(0), hi(0) {}
    NatRange(mpz_class lo_, mpz_class hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {}

    // length([a, b]) = b - a + 1
    mpz_class length() const { return hi - lo + 1; }
    bool unit() const { return lo == hi; }
    bool contains(const mpz_class& x) const { return lo <= x && x <= hi; }

    friend bool operator==(const NatRange&, const NatRange&) = default;

    std::string str() const { return "[" + lo.get_str() + ", " + hi.get_str() + "]"; }
};

// [0, 2^bits - 1]
inline NatRange full_range(std::size_t bits) {
    NatRange r;
    r.lo = 0;
    mpz_ui_pow_ui(r.hi.get_mpz_t(), 2, bits);
    r.hi -= 1;
    return r;
}

}  // namespace stegomark
