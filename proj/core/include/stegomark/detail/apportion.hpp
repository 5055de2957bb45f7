#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace stegomark::detail {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Scratch buffers shared across apportionment calls so the coding loops
// stay allocation-free once warm.
struct PartitionScratch {
    std::vector<u64> alloc;     // per-entry unit count
    std::vector<u64> boundary;  // size deg + 1, exclusive prefix of alloc
    std::vector<u64> rem;       // per-entry remainder of count*L/total
    std::vector<u64> rem_copy;  // threshold selection workspace
    std::vector<std::uint32_t> esum;  // extras before entry k (wide path)
    std::vector<u128> rsum;           // remainder prefix sums (wide path)
};

// Largest-remainder split of an integer length L among weighted entries.
//
// Every entry gets floor(count*L/total) units; the L - sum(floors)
// leftover units go one each to the entries with the largest remainders,
// ties to the lower index. If L >= 2 and deg >= 2 but only one entry
// ends up nonzero, one unit moves from that entry to the zero entry of
// highest count (ties again to the lower index) so a branching state
// always splits its range.
//
// Results land in scratch.alloc and scratch.boundary.
void apportion_u64(std::span<const u64> counts, u64 total, u64 L,
                   PartitionScratch& scratch);

// Apportionment for range lengths beyond 64 bits, evaluated lazily per
// boundary. Requires L > total, which holds whenever L does not fit in
// 64 bits (out-totals are capped below 2^63); every entry then receives
// at least one unit, so no fix-up or dropping can occur and boundaries
// are strictly increasing.
class MpzApportion {
  public:
    MpzApportion(std::span<const u64> counts, std::span<const u64> csums,
                 u64 total, const mpz_class& L, PartitionScratch& scratch);

    std::size_t size() const { return counts_.size(); }

    // Units allocated before entry k; boundary(0) = 0, boundary(deg) = L.
    void boundary(std::size_t k, mpz_class& out) const;

    // Largest k with boundary(k) <= x, for x in [0, L).
    std::size_t locate(const mpz_class& x, mpz_class& tmp) const;

  private:
    std::span<const u64> counts_;
    std::span<const u64> csums_;
    u64 total_;
    const mpz_class& len_;
    PartitionScratch& scratch_;
    mutable mpz_class sub_;  // 128-bit subtrahend workspace
};

// Marks which entries receive one of the `leftover` extra units: the
// largest remainders win, ties by ascending index. Returns flags via the
// callback to avoid materializing a vector.
template <typename F>
void select_extras(std::span<const u64> rem, std::vector<u64>& rem_copy,
                   u64 leftover, F&& is_extra_out) {
    if (leftover == 0) {
        for (std::size_t i = 0; i < rem.size(); ++i) is_extra_out(i, false);
        return;
    }
    rem_copy.assign(rem.begin(), rem.end());
    std::nth_element(rem_copy.begin(), rem_copy.begin() + (leftover - 1), rem_copy.end(),
                     std::greater<u64>());
    u64 threshold = rem_copy[leftover - 1];
    u64 above = 0;
    for (u64 r : rem)
        if (r > threshold) ++above;
    u64 ties_left = leftover - above;
    for (std::size_t i = 0; i < rem.size(); ++i) {
        bool extra = rem[i] > threshold;
        if (!extra && rem[i] == threshold && ties_left > 0) {
            extra = true;
            --ties_left;
        }
        is_extra_out(i, extra);
    }
}

}  // namespace stegomark::detail
