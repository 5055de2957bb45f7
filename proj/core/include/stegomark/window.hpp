#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "stegomark/bitio.hpp"
#include "stegomark/model.hpp"
#include "stegomark/range.hpp"

namespace stegomark {

inline constexpr unsigned kMinPrecision = 2;
inline constexpr unsigned kMaxPrecision = 63;  // window arithmetic stays in u64

// Widens an m-bit range to n bits: the low end is padded with 0 bits,
// the high end with 1 bits, so the result covers exactly the n-bit
// numbers whose leading m bits fall inside the short range.
NatRange expand(const NatRange& r_short, unsigned m, unsigned n);

// A short moving window over a conceptual n-bit range. The bits before
// the window have converged and were flushed; every bit after it is 0 in
// the conceptual lower bound and 1 in the upper, exactly as expand()
// lays them out.
struct WindowedRange {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    unsigned width = 0;        // bits currently inside the window
    std::uint64_t flushed = 0; // converged bits already emitted or dropped
    std::uint64_t total_bits = 0;  // conceptual range width n

    std::uint64_t pending() const { return total_bits - flushed - width; }
    std::uint64_t length() const { return hi - lo + 1; }

    friend bool operator==(const WindowedRange&, const WindowedRange&) = default;
};

// Initial window over [0, 2^n - 1]: min(precision, n) bits wide.
WindowedRange initial_window(std::uint64_t total_bits, unsigned precision);

// Windowed counterpart of subranges: partitions the window's integer
// interval with the same largest-remainder rule, so the conceptual
// subranges are the expansions of the returned windows. Quotas are
// computed over at most `precision` bits instead of all n.
std::vector<std::pair<StateId, WindowedRange>> subranges_fast(
    const MarkovModel& model, StateId s, const WindowedRange& wr, unsigned precision);

// Drops every leading bit position on which the window bounds agree,
// appending those bits to `sink`, then re-widens the window toward
// `precision` bits (low bound padded with 0, high with 1) without
// running past the conceptual width. This is the decode-direction flush;
// the encoder's variant additionally consumes target bits and lives in
// the codec.
WindowedRange flush_converged(WindowedRange wr, unsigned precision, BitWriter& sink);

namespace detail {

inline std::uint64_t low_mask(unsigned bits) {
    return bits == 0 ? 0 : (~std::uint64_t{0} >> (64 - bits));
}

// Number of leading bit positions (at the given width) where lo and hi
// agree.
unsigned converged_prefix(std::uint64_t lo, std::uint64_t hi, unsigned width);

}  // namespace detail

}  // namespace stegomark
