#include "stegomark/partition.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "stegomark/errors.hpp"

namespace stegomark {

namespace detail {

void apportion_u64(std::span<const u64> counts, u64 total, u64 L,
                   PartitionScratch& scratch) {
    const std::size_t deg = counts.size();
    assert(deg >= 1 && total >= 1);
    scratch.alloc.resize(deg);
    scratch.rem.resize(deg);

    u64 assigned = 0;
    for (std::size_t i = 0; i < deg; ++i) {
        u128 product = static_cast<u128>(counts[i]) * L;
        scratch.alloc[i] = static_cast<u64>(product / total);
        scratch.rem[i] = static_cast<u64>(product % total);
        assigned += scratch.alloc[i];
    }
    u64 leftover = L - assigned;
    select_extras(std::span<const u64>(scratch.rem), scratch.rem_copy, leftover,
                  [&](std::size_t i, bool extra) {
                      if (extra) ++scratch.alloc[i];
                  });

    if (L >= 2 && deg >= 2) {
        std::size_t nonzero = 0, winner = 0;
        for (std::size_t i = 0; i < deg; ++i) {
            if (scratch.alloc[i] > 0) {
                ++nonzero;
                winner = i;
            }
        }
        if (nonzero < 2) {
            // One state swallowed the whole range; hand one unit to the
            // most probable starved state so the split still branches.
            std::size_t starved = deg;
            for (std::size_t i = 0; i < deg; ++i) {
                if (scratch.alloc[i] == 0 &&
                    (starved == deg || counts[i] > counts[starved]))
                    starved = i;
            }
            assert(starved < deg);
            --scratch.alloc[winner];
            ++scratch.alloc[starved];
        }
    }

    scratch.boundary.resize(deg + 1);
    u64 acc = 0;
    for (std::size_t i = 0; i < deg; ++i) {
        scratch.boundary[i] = acc;
        acc += scratch.alloc[i];
    }
    scratch.boundary[deg] = acc;
    assert(acc == L);
}

MpzApportion::MpzApportion(std::span<const u64> counts, std::span<const u64> csums,
                           u64 total, const mpz_class& L, PartitionScratch& scratch)
    : counts_(counts), csums_(csums), total_(total), len_(L), scratch_(scratch) {
    const std::size_t deg = counts.size();
    const u64 lm = mpz_fdiv_ui(L.get_mpz_t(), total);
    scratch.rem.resize(deg);
    scratch.rsum.resize(deg + 1);
    scratch.esum.resize(deg + 1);
    u128 running = 0;
    for (std::size_t i = 0; i < deg; ++i) {
        scratch.rsum[i] = running;
        scratch.rem[i] = static_cast<u64>((static_cast<u128>(counts[i]) * lm) % total);
        running += scratch.rem[i];
    }
    scratch.rsum[deg] = running;
    const u64 leftover = static_cast<u64>(running / total);  // exact by construction
    std::uint32_t extras_so_far = 0;
    select_extras(std::span<const u64>(scratch.rem), scratch.rem_copy, leftover,
                  [&](std::size_t i, bool extra) {
                      scratch.esum[i] = extras_so_far;
                      if (extra) ++extras_so_far;
                  });
    scratch.esum[deg] = extras_so_far;
}

void MpzApportion::boundary(std::size_t k, mpz_class& out) const {
    if (k == 0) {
        out = 0;
        return;
    }
    if (k == counts_.size()) {
        out = len_;
        return;
    }
    // boundary_k = (L*csum_k - rsum_k) / total + esum_k, exactly divisible
    mpz_mul_ui(out.get_mpz_t(), len_.get_mpz_t(), csums_[k]);
    const u128 rs = scratch_.rsum[k];
    const u64 hi = static_cast<u64>(rs >> 64);
    const u64 lo = static_cast<u64>(rs);
    if (hi) {
        mpz_set_ui(sub_.get_mpz_t(), hi);
        mpz_mul_2exp(sub_.get_mpz_t(), sub_.get_mpz_t(), 64);
        mpz_sub(out.get_mpz_t(), out.get_mpz_t(), sub_.get_mpz_t());
    }
    mpz_sub_ui(out.get_mpz_t(), out.get_mpz_t(), lo);
    mpz_divexact_ui(out.get_mpz_t(), out.get_mpz_t(), total_);
    mpz_add_ui(out.get_mpz_t(), out.get_mpz_t(), scratch_.esum[k]);
}

std::size_t MpzApportion::locate(const mpz_class& x, mpz_class& tmp) const {
    const std::size_t deg = counts_.size();
    // Seed the search with a double approximation of x / L scaled to the
    // cumulative counts; the relative error is ~2^-52, so the guess is
    // almost always exact and the walk below settles it rigorously.
    // Mantissa/exponent form keeps the quotient finite at any bit width.
    long ex = 0, el = 0;
    const double dx = mpz_get_d_2exp(&ex, x.get_mpz_t());
    const double dl = mpz_get_d_2exp(&el, len_.get_mpz_t());
    const double frac = dx == 0 ? 0 : std::ldexp(dx / dl, static_cast<int>(ex - el));
    double scaled = frac * static_cast<double>(total_);
    if (scaled < 0) scaled = 0;
    if (scaled >= static_cast<double>(total_)) scaled = static_cast<double>(total_) - 1;
    const u64 target = static_cast<u64>(scaled);
    auto it = std::upper_bound(csums_.begin(), csums_.end(), target);
    std::size_t k = static_cast<std::size_t>(it - csums_.begin());
    k = k == 0 ? 0 : k - 1;
    if (k >= deg) k = deg - 1;

    while (k > 0) {  // boundary(k) must not exceed x
        boundary(k, tmp);
        if (tmp <= x) break;
        --k;
    }
    while (k + 1 < deg) {  // x must fall short of boundary(k + 1)
        boundary(k + 1, tmp);
        if (x < tmp) break;
        ++k;
    }
    return k;
}

}  // namespace detail

namespace {

thread_local detail::PartitionScratch tl_scratch;

bool fits_u64(const mpz_class& v) { return mpz_fits_ulong_p(v.get_mpz_t()) != 0; }

void require_splittable(const MarkovModel& model, StateId s, const NatRange& r,
                        std::size_t deg) {
    if (deg == 0)
        throw NoOutboundState("state '" + std::string(model.states[s]) +
                              "' has no outbound edges");
    if (deg >= 2 && r.unit())
        throw std::invalid_argument("cannot split a unit range at a branching state");
}

}  // namespace

std::vector<std::pair<StateId, mpz_class>> apportion(
    std::span<const std::pair<StateId, std::uint64_t>> weights,
    std::uint64_t denominator, const mpz_class& total_length) {
    if (weights.empty()) throw std::invalid_argument("apportion: no weights");
    if (total_length < 1) throw std::invalid_argument("apportion: empty length");
    std::uint64_t sum = 0;
    std::vector<detail::u64> counts, csums;
    counts.reserve(weights.size());
    csums.reserve(weights.size());
    for (const auto& [state, weight] : weights) {
        if (weight == 0) throw std::invalid_argument("apportion: zero weight");
        csums.push_back(sum);
        counts.push_back(weight);
        sum += weight;
    }
    if (sum != denominator)
        throw std::invalid_argument("apportion: weights do not sum to the denominator");

    std::vector<std::pair<StateId, mpz_class>> out;
    out.reserve(weights.size());
    if (fits_u64(total_length)) {
        detail::apportion_u64(counts, denominator, total_length.get_ui(), tl_scratch);
        for (std::size_t i = 0; i < weights.size(); ++i)
            out.emplace_back(weights[i].first, mpz_class(tl_scratch.alloc[i]));
    } else {
        detail::MpzApportion plan(counts, csums, denominator, total_length, tl_scratch);
        mpz_class prev(0), cur;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            plan.boundary(i + 1, cur);
            out.emplace_back(weights[i].first, cur - prev);
            std::swap(prev, cur);
        }
    }
    return out;
}

SubrangeMap subranges(const MarkovModel& model, StateId s, const NatRange& r) {
    const std::size_t deg = model.degree(s);
    require_splittable(model, s, r, deg);
    auto succ = model.successors(s);
    if (deg == 1) return {{succ[0], r}};

    SubrangeMap out;
    const mpz_class len = r.length();
    if (fits_u64(len)) {
        detail::apportion_u64(model.counts(s), model.out_total[s], len.get_ui(),
                              tl_scratch);
        for (std::size_t i = 0; i < deg; ++i) {
            if (tl_scratch.alloc[i] == 0) continue;
            NatRange sub(r.lo + tl_scratch.boundary[i],
                         r.lo + (tl_scratch.boundary[i + 1] - 1));
            out.emplace_back(succ[i], std::move(sub));
        }
    } else {
        detail::MpzApportion plan(model.counts(s), model.csums(s), model.out_total[s],
                                  len, tl_scratch);
        mpz_class prev(0), cur;
        for (std::size_t i = 0; i < deg; ++i) {
            plan.boundary(i + 1, cur);
            NatRange sub(r.lo + prev, r.lo + cur - 1);
            out.emplace_back(succ[i], std::move(sub));
            std::swap(prev, cur);
        }
    }
    return out;
}

NatRange subrange_for_state(const MarkovModel& model, StateId s, const NatRange& r,
                            StateId s_next) {
    const std::size_t deg = model.degree(s);
    require_splittable(model, s, r, deg);
    const std::size_t edge = model.find_edge(s, s_next);
    if (edge == MarkovModel::npos)
        throw StateNotInPartition("state '" + model.states[s_next] +
                                  "' is not an outbound state of '" + model.states[s] + "'");
    if (deg == 1) return r;

    const std::size_t k = edge - model.row_begin[s];
    const mpz_class len = r.length();
    if (fits_u64(len)) {
        detail::apportion_u64(model.counts(s), model.out_total[s], len.get_ui(),
                              tl_scratch);
        if (tl_scratch.alloc[k] == 0)
            throw StateNotInPartition("state '" + model.states[s_next] +
                                      "' received no subrange of " + r.str());
        return NatRange(r.lo + tl_scratch.boundary[k],
                        r.lo + (tl_scratch.boundary[k + 1] - 1));
    }
    detail::MpzApportion plan(model.counts(s), model.csums(s), model.out_total[s], len,
                              tl_scratch);
    mpz_class lo, hi;
    plan.boundary(k, lo);
    plan.boundary(k + 1, hi);
    return NatRange(r.lo + lo, r.lo + hi - 1);
}

namespace {

// Shared lookup for the *ForNumber pair: the index and bounds of the
// entry containing `number`.
std::size_t locate_entry(const MarkovModel& model, StateId s, const NatRange& r,
                         const mpz_class& number, NatRange& bounds_out) {
    const std::size_t deg = model.degree(s);
    require_splittable(model, s, r, deg);
    if (!r.contains(number))
        throw NumberOutOfRange("number " + number.get_str() + " lies outside " + r.str());
    if (deg == 1) {
        bounds_out = r;
        return 0;
    }
    const mpz_class len = r.length();
    const mpz_class offset = number - r.lo;
    if (fits_u64(len)) {
        detail::apportion_u64(model.counts(s), model.out_total[s], len.get_ui(),
                              tl_scratch);
        const auto& b = tl_scratch.boundary;
        auto it = std::upper_bound(b.begin(), b.end(), offset.get_ui());
        const std::size_t k = static_cast<std::size_t>(it - b.begin()) - 1;
        bounds_out = NatRange(r.lo + b[k], r.lo + (b[k + 1] - 1));
        return k;
    }
    detail::MpzApportion plan(model.counts(s), model.csums(s), model.out_total[s], len,
                              tl_scratch);
    mpz_class tmp;
    const std::size_t k = plan.locate(offset, tmp);
    mpz_class lo, hi;
    plan.boundary(k, lo);
    plan.boundary(k + 1, hi);
    bounds_out = NatRange(r.lo + lo, r.lo + hi - 1);
    return k;
}

}  // namespace

NatRange subrange_for_number(const MarkovModel& model, StateId s, const NatRange& r,
                             const mpz_class& number) {
    NatRange bounds;
    locate_entry(model, s, r, number, bounds);
    return bounds;
}

StateId state_for_number(const MarkovModel& model, StateId s, const NatRange& r,
                         const mpz_class& number) {
    NatRange bounds;
    const std::size_t k = locate_entry(model, s, r, number, bounds);
    return model.successors(s)[k];
}

}  // namespace stegomark
