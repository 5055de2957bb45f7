#include "stegomark/codec.hpp"

#include <algorithm>
#include <cassert>
#include <random>
#include <stdexcept>

#include "stegomark/bitio.hpp"
#include "stegomark/detail/apportion.hpp"
#include "stegomark/errors.hpp"
#include "stegomark/partition.hpp"
#include "stegomark/range.hpp"
#include "stegomark/window.hpp"

namespace stegomark {

namespace {

using detail::u64;

void check_mode(CoderMode mode, unsigned precision) {
    if (mode == CoderMode::windowed &&
        (precision < kMinPrecision || precision > kMaxPrecision))
        throw std::invalid_argument("precision must lie in [2, 63]");
}

void check_start(const MarkovModel& model, StateId start) {
    if (start >= model.state_count())
        throw std::invalid_argument("start state out of range");
}

// ---- exact mode ---------------------------------------------------------

std::vector<StateId> encode_exact(const MarkovModel& model, const mpz_class& number,
                                  std::uint64_t bit_count, StateId start) {
    std::vector<StateId> out;
    if (bit_count == 0) return out;

    detail::PartitionScratch scratch;
    mpz_class len;
    mpz_ui_pow_ui(len.get_mpz_t(), 2, bit_count);
    mpz_class x = number;  // offset of the target within the current range
    mpz_class tmp, blo, bhi;
    StateId s = start;

    while (len != 1) {
        const std::size_t deg = model.degree(s);
        if (deg == 0)
            throw NoOutboundState("state '" + model.states[s] + "' has no outbound edges");
        auto succ = model.successors(s);
        if (deg == 1) {
            s = succ[0];
            out.push_back(s);
            continue;
        }
        if (mpz_fits_ulong_p(len.get_mpz_t())) {
            // narrow tail: everything fits machine words
            u64 len64 = len.get_ui();
            u64 x64 = x.get_ui();
            while (len64 != 1) {
                const std::size_t d = model.degree(s);
                if (d == 0)
                    throw NoOutboundState("state '" + model.states[s] +
                                          "' has no outbound edges");
                auto sc = model.successors(s);
                if (d == 1) {
                    s = sc[0];
                    out.push_back(s);
                    continue;
                }
                detail::apportion_u64(model.counts(s), model.out_total[s], len64, scratch);
                auto it = std::upper_bound(scratch.boundary.begin(),
                                           scratch.boundary.end(), x64);
                const std::size_t k = static_cast<std::size_t>(
                    it - scratch.boundary.begin()) - 1;
                x64 -= scratch.boundary[k];
                len64 = scratch.boundary[k + 1] - scratch.boundary[k];
                s = sc[k];
                out.push_back(s);
            }
            return out;
        }
        detail::MpzApportion plan(model.counts(s), model.csums(s), model.out_total[s],
                                  len, scratch);
        const std::size_t k = plan.locate(x, tmp);
        plan.boundary(k, blo);
        plan.boundary(k + 1, bhi);
        x -= blo;
        len = bhi - blo;
        s = succ[k];
        out.push_back(s);
    }
    return out;
}

DecodedBits decode_exact(const MarkovModel& model, std::span<const StateId> text,
                         std::uint64_t bit_count, StateId start) {
    // A single word never narrows the range by more than a factor of the
    // out-total (< 2^63), so a text this short cannot converge; bail out
    // before materializing a huge range from a corrupt header.
    if (bit_count > 64 * (static_cast<std::uint64_t>(text.size()) + 1))
        throw TextExhausted("text of " + std::to_string(text.size()) +
                            " states is too short to carry " +
                            std::to_string(bit_count) + " bits");
    detail::PartitionScratch scratch;
    mpz_class len;
    mpz_ui_pow_ui(len.get_mpz_t(), 2, bit_count);
    mpz_class lo(0), blo, bhi;
    StateId prev = start;
    std::size_t idx = 0;

    while (len != 1) {
        if (idx == text.size())
            throw TextExhausted("text ended after " + std::to_string(idx) +
                                " states, before the range converged");
        const StateId w = text[idx++];
        if (w >= model.state_count())
            throw StateNotInPartition("unknown state id " + std::to_string(w));
        const std::size_t deg = model.degree(prev);
        if (deg == 0)
            throw NoOutboundState("state '" + model.states[prev] + "' has no outbound edges");
        const std::size_t edge = model.find_edge(prev, w);
        if (edge == MarkovModel::npos)
            throw StateNotInPartition("'" + model.states[w] +
                                      "' cannot follow '" + model.states[prev] + "'");
        if (deg == 1) {
            prev = w;
            continue;
        }
        const std::size_t k = edge - model.row_begin[prev];
        if (mpz_fits_ulong_p(len.get_mpz_t())) {
            detail::apportion_u64(model.counts(prev), model.out_total[prev], len.get_ui(),
                                  scratch);
            if (scratch.alloc[k] == 0)
                throw StateNotInPartition("'" + model.states[w] +
                                          "' received no subrange at this step");
            mpz_add_ui(lo.get_mpz_t(), lo.get_mpz_t(), scratch.boundary[k]);
            len = scratch.alloc[k];
        } else {
            detail::MpzApportion plan(model.counts(prev), model.csums(prev),
                                      model.out_total[prev], len, scratch);
            plan.boundary(k, blo);
            plan.boundary(k + 1, bhi);
            lo += blo;
            len = bhi - blo;
        }
        prev = w;
    }

    DecodedBits out;
    out.states_consumed = idx;
    const std::size_t nbytes = static_cast<std::size_t>((bit_count + 7) / 8);
    out.bytes.assign(nbytes, 0);
    if (bit_count > 0) {
        const unsigned pad = static_cast<unsigned>(nbytes * 8 - bit_count);
        if (pad > 0) lo <<= pad;
        std::size_t written = 0;
        mpz_export(out.bytes.data(), &written, 1, 1, 0, 0, lo.get_mpz_t());
        // mpz_export writes a minimal big-endian string; right-align it
        if (written > 0 && written < nbytes) {
            std::move_backward(out.bytes.begin(), out.bytes.begin() + written,
                               out.bytes.begin() + nbytes);
            std::fill(out.bytes.begin(), out.bytes.begin() + (nbytes - written), 0);
        }
    }
    return out;
}

// ---- windowed mode ------------------------------------------------------

std::vector<StateId> encode_windowed(const MarkovModel& model, BitReader src,
                                     StateId start, unsigned precision) {
    const std::uint64_t n = src.size_bits();
    std::vector<StateId> out;
    if (n == 0) return out;

    detail::PartitionScratch scratch;
    WindowedRange wr = initial_window(n, precision);
    u64 target = src.read_bits(wr.width);
    StateId s = start;

    while (wr.width > 0) {
        const std::size_t deg = model.degree(s);
        if (deg == 0)
            throw NoOutboundState("state '" + model.states[s] + "' has no outbound edges");
        auto succ = model.successors(s);
        if (deg == 1) {
            s = succ[0];
            out.push_back(s);
            continue;
        }
        detail::apportion_u64(model.counts(s), model.out_total[s], wr.length(), scratch);
        const u64 x = target - wr.lo;
        auto it = std::upper_bound(scratch.boundary.begin(), scratch.boundary.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - scratch.boundary.begin()) - 1;
        const u64 base = wr.lo;
        wr.lo = base + scratch.boundary[k];
        wr.hi = base + scratch.boundary[k + 1] - 1;
        s = succ[k];
        out.push_back(s);

        // drop converged bits (they equal the target's leading bits) and
        // pull fresh input into the freed positions
        const unsigned prefix = detail::converged_prefix(wr.lo, wr.hi, wr.width);
        if (prefix > 0) {
            assert(wr.lo >> (wr.width - prefix) == target >> (wr.width - prefix));
            wr.width -= prefix;
            wr.flushed += prefix;
            wr.lo &= detail::low_mask(wr.width);
            wr.hi &= detail::low_mask(wr.width);
            target &= detail::low_mask(wr.width);
        }
        const unsigned grow = static_cast<unsigned>(
            std::min<std::uint64_t>(precision - wr.width, wr.pending()));
        if (grow > 0) {
            wr.lo <<= grow;
            wr.hi = (wr.hi << grow) | detail::low_mask(grow);
            target = (target << grow) | src.read_bits(grow);
            wr.width += grow;
        }
    }
    return out;
}

DecodedBits decode_windowed(const MarkovModel& model, std::span<const StateId> text,
                            std::uint64_t bit_count, StateId start, unsigned precision) {
    DecodedBits out;
    if (bit_count == 0) return out;

    detail::PartitionScratch scratch;
    BitWriter sink;
    WindowedRange wr = initial_window(bit_count, precision);
    StateId prev = start;
    std::size_t idx = 0;

    while (wr.width > 0) {
        if (idx == text.size())
            throw TextExhausted("text ended after " + std::to_string(idx) +
                                " states, before the window converged");
        const StateId w = text[idx++];
        if (w >= model.state_count())
            throw StateNotInPartition("unknown state id " + std::to_string(w));
        const std::size_t deg = model.degree(prev);
        if (deg == 0)
            throw NoOutboundState("state '" + model.states[prev] + "' has no outbound edges");
        const std::size_t edge = model.find_edge(prev, w);
        if (edge == MarkovModel::npos)
            throw StateNotInPartition("'" + model.states[w] +
                                      "' cannot follow '" + model.states[prev] + "'");
        if (deg == 1) {
            prev = w;
            continue;
        }
        detail::apportion_u64(model.counts(prev), model.out_total[prev], wr.length(),
                              scratch);
        const std::size_t k = edge - model.row_begin[prev];
        if (scratch.alloc[k] == 0)
            throw StateNotInPartition("'" + model.states[w] +
                                      "' received no subrange at this step");
        const u64 base = wr.lo;
        wr.lo = base + scratch.boundary[k];
        wr.hi = base + scratch.boundary[k + 1] - 1;
        prev = w;
        wr = flush_converged(wr, precision, sink);
    }
    assert(sink.size_bits() == bit_count);
    out.bytes = sink.take();
    out.bytes.resize((bit_count + 7) / 8);
    out.states_consumed = idx;
    return out;
}

mpz_class number_from_bits(std::span<const std::uint8_t> data, std::uint64_t bit_count) {
    const std::size_t nbytes = static_cast<std::size_t>((bit_count + 7) / 8);
    if (data.size() < nbytes)
        throw std::invalid_argument("data shorter than the requested bit count");
    mpz_class n(0);
    if (nbytes > 0)
        mpz_import(n.get_mpz_t(), nbytes, 1, 1, 0, 0, data.data());
    const unsigned excess = static_cast<unsigned>(nbytes * 8 - bit_count);
    if (excess > 0) n >>= excess;
    return n;
}

}  // namespace

std::vector<StateId> encode_fixed(const MarkovModel& model,
                                  std::span<const std::uint8_t> data,
                                  std::uint64_t bit_count, StateId start, CoderMode mode,
                                  unsigned precision) {
    check_mode(mode, precision);
    check_start(model, start);
    if (mode == CoderMode::windowed) {
        const std::size_t nbytes = static_cast<std::size_t>((bit_count + 7) / 8);
        if (data.size() < nbytes)
            throw std::invalid_argument("data shorter than the requested bit count");
        return encode_windowed(model, BitReader(data, bit_count), start, precision);
    }
    return encode_exact(model, number_from_bits(data, bit_count), bit_count, start);
}

std::vector<StateId> encode_fixed_value(const MarkovModel& model, std::uint64_t value,
                                        unsigned bit_count, StateId start, CoderMode mode,
                                        unsigned precision) {
    check_mode(mode, precision);
    check_start(model, start);
    if (bit_count > 63) throw std::invalid_argument("value form is limited to 63 bits");
    if (bit_count < 64 && value >= (std::uint64_t{1} << bit_count))
        throw NumberOutOfRange("value does not fit in " + std::to_string(bit_count) +
                               " bits");
    if (mode == CoderMode::windowed)
        return encode_windowed(model, BitReader(value, bit_count), start, precision);
    return encode_exact(model, mpz_class(value), bit_count, start);
}

DecodedBits decode_fixed(const MarkovModel& model, std::span<const StateId> text,
                         std::uint64_t bit_count, StateId start, CoderMode mode,
                         unsigned precision) {
    check_mode(mode, precision);
    check_start(model, start);
    if (mode == CoderMode::windowed)
        return decode_windowed(model, text, bit_count, start, precision);
    return decode_exact(model, text, bit_count, start);
}

StegoText encode(const MarkovModel& model, std::span<const std::uint8_t> payload,
                 const CodecConfig& config, std::optional<std::uint64_t> seed) {
    if (config.header_bits < 1 || config.header_bits > 63)
        throw std::invalid_argument("header_bits must lie in [1, 63]");
    check_mode(config.mode, config.precision);
    check_start(model, config.start);
    if (config.model_digest != 0 && config.model_digest != model.digest)
        throw ConfigMismatch("model digest does not match the configured digest");

    const std::uint64_t n = std::uint64_t{payload.size()} * 8;
    if (config.header_bits < 64 && n >= (std::uint64_t{1} << config.header_bits))
        throw PayloadTooLarge("payload of " + std::to_string(payload.size()) +
                              " bytes does not fit a " +
                              std::to_string(config.header_bits) + "-bit header");

    // Header carries n with its bits reversed: short payloads would
    // otherwise always lead with a run of zero bits and open every text
    // with the same words.
    const std::uint64_t header_value = reverse_bits(n, config.header_bits);
    std::vector<StateId> states =
        encode_fixed_value(model, header_value, config.header_bits, config.start,
                           config.mode, config.precision);
    StateId w = states.back();
    if (n > 0) {
        auto body = encode_fixed(model, payload, n, w, config.mode, config.precision);
        states.insert(states.end(), body.begin(), body.end());
    }
    const StateId z = states.back();
    auto tail = random_text(model, z, seed);
    states.insert(states.end(), tail.begin(), tail.end());

    StegoText out;
    out.rendering = detokenize(model, states);
    out.states = std::move(states);
    return out;
}

std::vector<std::uint8_t> decode(const MarkovModel& model, std::span<const StateId> states,
                                 const CodecConfig& config) {
    if (config.header_bits < 1 || config.header_bits > 63)
        throw std::invalid_argument("header_bits must lie in [1, 63]");
    check_mode(config.mode, config.precision);
    check_start(model, config.start);
    if (config.model_digest != 0 && config.model_digest != model.digest)
        throw ConfigMismatch("model digest does not match the configured digest");

    DecodedBits header = decode_fixed(model, states, config.header_bits, config.start,
                                      config.mode, config.precision);
    const std::uint64_t reversed =
        BitReader(header.bytes, config.header_bits).read_bits(config.header_bits);
    const std::uint64_t n = reverse_bits(reversed, config.header_bits);
    if (n % 8 != 0)
        throw BadHeader("decoded bit length " + std::to_string(n) +
                        " is not a whole number of bytes");
    if (n == 0) return {};

    const StateId w = states[header.states_consumed - 1];
    DecodedBits body = decode_fixed(model, states.subspan(header.states_consumed), n, w,
                                    config.mode, config.precision);
    return std::move(body.bytes);
}

std::vector<std::uint8_t> decode_text(const MarkovModel& model, std::string_view text,
                                      const CodecConfig& config) {
    return decode(model, states_from_text(model, text), config);
}

std::vector<StateId> random_text(const MarkovModel& model, StateId from,
                                 std::optional<std::uint64_t> seed,
                                 std::size_t max_states) {
    check_start(model, from);
    std::vector<StateId> out;
    std::mt19937_64 gen(seed ? *seed : std::random_device{}());
    auto draw = [&gen](std::uint64_t bound) {
        // unbiased bounded draw by rejection; mt19937_64 output is
        // reproducible across platforms, unlike the distribution classes
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v;
        do {
            v = gen();
        } while (v >= limit);
        return v % bound;
    };

    StateId cur = from;
    while (out.size() + model.dist_to_start[cur] < max_states) {
        auto csums = model.csums(cur);
        const std::uint64_t v = draw(model.out_total[cur]);
        auto it = std::upper_bound(csums.begin(), csums.end(), v);
        const std::size_t k = static_cast<std::size_t>(it - csums.begin()) - 1;
        cur = model.successors(cur)[k];
        out.push_back(cur);
        if (cur == kStartState) return out;
    }
    while (cur != kStartState) {  // out of budget: finish along the shortest path
        cur = model.hop_to_start[cur];
        out.push_back(cur);
    }
    return out;
}

std::string detokenize(const MarkovModel& model, std::span<const StateId> states) {
    std::string out;
    for (StateId s : states) {
        if (s == kStartState) {
            out += '.';
        } else {
            if (!out.empty()) out += ' ';
            out += model.render(s);
        }
    }
    if (!states.empty() && states.back() != kStartState) out += '.';
    return out;
}

std::vector<StateId> states_from_text(const MarkovModel& model, std::string_view text) {
    return states_from_sentences(model, tokenize(text));
}

}  // namespace stegomark
