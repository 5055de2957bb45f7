#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stegomark/codec.hpp"
#include "stegomark/model.hpp"

namespace testsupport {

// Parses "s1 s4 . s2" into state ids, "." meaning the start state.
inline std::vector<stegomark::StateId> parse_states(const stegomark::MarkovModel& m,
                                                    std::string_view text) {
    std::vector<stegomark::StateId> out;
    std::istringstream ss{std::string(text)};
    std::string tok;
    while (ss >> tok) {
        if (tok == ".") {
            out.push_back(stegomark::kStartState);
        } else {
            auto id = m.lookup(tok);
            REQUIRE(id != stegomark::kNoState);
            out.push_back(id);
        }
    }
    return out;
}

inline std::string render_states(const stegomark::MarkovModel& m,
                                 std::span<const stegomark::StateId> states) {
    std::string out;
    for (auto s : states) {
        if (!out.empty()) out += ' ';
        out += s == stegomark::kStartState ? "." : std::string(m.states[s]);
    }
    return out;
}

// Bits of a byte buffer in stream order (bit 0 = MSB of byte 0).
inline unsigned bit_at(std::span<const std::uint8_t> bytes, std::size_t i) {
    return (bytes[i / 8] >> (7 - i % 8)) & 1u;
}

// Packs a "0101..." string into MSB-first bytes.
inline std::vector<std::uint8_t> pack_bits(std::string_view bits) {
    std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] == '1') out[i / 8] |= static_cast<std::uint8_t>(1u << (7 - i % 8));
    return out;
}

inline std::uint64_t value_of_bits(std::string_view bits) {
    std::uint64_t v = 0;
    for (char c : bits) v = v * 2 + static_cast<unsigned>(c - '0');
    return v;
}

inline std::vector<std::uint8_t> random_bytes(std::mt19937_64& gen, std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(gen());
    return out;
}

// Unbiased bounded draw; avoids the implementation-defined distribution
// classes so expected values can be frozen.
inline std::uint64_t draw(std::mt19937_64& gen, std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
        v = gen();
    } while (v >= limit);
    return v % bound;
}

// Checks that every adjacent pair of the path has positive probability.
inline bool admissible_path(const stegomark::MarkovModel& m,
                            std::span<const stegomark::StateId> states,
                            stegomark::StateId from) {
    stegomark::StateId prev = from;
    for (auto s : states) {
        if (m.find_edge(prev, s) == stegomark::MarkovModel::npos) return false;
        prev = s;
    }
    return true;
}

// A random walk of `steps` admissible states starting after `from`.
inline std::vector<stegomark::StateId> random_continuation(const stegomark::MarkovModel& m,
                                                           stegomark::StateId from,
                                                           std::size_t steps,
                                                           std::mt19937_64& gen) {
    std::vector<stegomark::StateId> out;
    stegomark::StateId cur = from;
    for (std::size_t i = 0; i < steps; ++i) {
        auto succ = m.successors(cur);
        cur = succ[draw(gen, succ.size())];
        out.push_back(cur);
    }
    return out;
}

}  // namespace testsupport
