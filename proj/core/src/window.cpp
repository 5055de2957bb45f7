#include "stegomark/window.hpp"

#include <bit>
#include <cassert>
#include <stdexcept>

#include "stegomark/detail/apportion.hpp"
#include "stegomark/errors.hpp"

namespace stegomark {

NatRange expand(const NatRange& r_short, unsigned m, unsigned n) {
    if (m > n) throw std::invalid_argument("expand: m exceeds n");
    NatRange padded = full_range(m);
    if (!padded.contains(r_short.lo) || !padded.contains(r_short.hi) ||
        r_short.lo > r_short.hi)
        throw std::invalid_argument("expand: range does not fit in m bits");
    NatRange out;
    out.lo = r_short.lo << (n - m);
    out.hi = (r_short.hi + 1) << (n - m);
    out.hi -= 1;
    return out;
}

WindowedRange initial_window(std::uint64_t total_bits, unsigned precision) {
    assert(precision >= kMinPrecision && precision <= kMaxPrecision);
    WindowedRange wr;
    wr.total_bits = total_bits;
    wr.width = static_cast<unsigned>(
        std::min<std::uint64_t>(precision, total_bits));
    wr.lo = 0;
    wr.hi = detail::low_mask(wr.width);
    return wr;
}

unsigned detail::converged_prefix(std::uint64_t lo, std::uint64_t hi, unsigned width) {
    if (lo == hi) return width;
    const std::uint64_t diff = lo ^ hi;
    const unsigned highest = 63 - static_cast<unsigned>(std::countl_zero(diff));
    assert(highest < width);
    return width - 1 - highest;
}

std::vector<std::pair<StateId, WindowedRange>> subranges_fast(
    const MarkovModel& model, StateId s, const WindowedRange& wr, unsigned precision) {
    if (precision < kMinPrecision || precision > kMaxPrecision)
        throw std::invalid_argument("precision out of range");
    if (wr.width > precision)
        throw std::invalid_argument("window wider than the configured precision");

    const std::size_t deg = model.degree(s);
    if (deg == 0)
        throw NoOutboundState("state '" + model.states[s] + "' has no outbound edges");
    auto succ = model.successors(s);
    if (deg == 1) return {{succ[0], wr}};
    if (wr.length() < 2)
        throw std::invalid_argument("cannot split a unit window at a branching state");

    thread_local detail::PartitionScratch scratch;
    detail::apportion_u64(model.counts(s), model.out_total[s], wr.length(), scratch);

    std::vector<std::pair<StateId, WindowedRange>> out;
    for (std::size_t i = 0; i < deg; ++i) {
        if (scratch.alloc[i] == 0) continue;
        WindowedRange part = wr;
        part.lo = wr.lo + scratch.boundary[i];
        part.hi = wr.lo + scratch.boundary[i + 1] - 1;
        out.emplace_back(succ[i], part);
    }
    return out;
}

WindowedRange flush_converged(WindowedRange wr, unsigned precision, BitWriter& sink) {
    const unsigned prefix = detail::converged_prefix(wr.lo, wr.hi, wr.width);
    if (prefix > 0) {
        sink.write_bits(wr.lo >> (wr.width - prefix), prefix);
        wr.width -= prefix;
        wr.lo &= detail::low_mask(wr.width);
        wr.hi &= detail::low_mask(wr.width);
        wr.flushed += prefix;
    }
    const unsigned grow = static_cast<unsigned>(
        std::min<std::uint64_t>(precision - wr.width, wr.pending()));
    if (grow > 0) {
        wr.lo <<= grow;
        wr.hi = (wr.hi << grow) | detail::low_mask(grow);
        wr.width += grow;
    }
    return wr;
}

}  // namespace stegomark
