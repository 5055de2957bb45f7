#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stegomark/tokenizer.hpp"

namespace stegomark {

using StateId = std::uint32_t;

inline constexpr StateId kStartState = 0;
inline constexpr StateId kNoState = static_cast<StateId>(-1);

// String form of the sentence-boundary state. Tokens can never collide
// with it because '.' is a sentence terminator for the tokenizer.
inline constexpr std::string_view kStartMarker = ".";

// A Markov chain over words estimated from adjacency counts.
//
// States are stored in canonical order: the start state first, then all
// other states in strict lexicographic order of their string form (for
// order-2 states the string form is "first second"). Probabilities are
// never materialized; every consumer works from the integer counts, so
// two parties building from the same corpus agree bit for bit.
//
// Edges are kept CSR-style, sorted by (from, to). Immutable once
// finalized; safe to share across threads.
struct MarkovModel {
    std::uint8_t order = 1;  // 1 = word states, 2 = word-pair states
    std::vector<std::string> states;

    std::vector<std::size_t> row_begin;   // states.size() + 1 entries
    std::vector<StateId> edge_to;
    std::vector<std::uint64_t> edge_count;
    std::vector<std::uint64_t> edge_csum;  // exclusive prefix sums per row
    std::vector<std::uint64_t> out_total;  // per state

    // Derived navigation data (filled by finalize()).
    std::vector<std::uint32_t> dist_to_start;
    std::vector<StateId> hop_to_start;
    std::unordered_map<std::string, StateId> index;
    std::uint64_t digest = 0;

    std::size_t state_count() const { return states.size(); }
    std::size_t edge_count_total() const { return edge_to.size(); }

    std::size_t degree(StateId s) const { return row_begin[s + 1] - row_begin[s]; }

    std::span<const StateId> successors(StateId s) const {
        return {edge_to.data() + row_begin[s], degree(s)};
    }
    std::span<const std::uint64_t> counts(StateId s) const {
        return {edge_count.data() + row_begin[s], degree(s)};
    }
    std::span<const std::uint64_t> csums(StateId s) const {
        return {edge_csum.data() + row_begin[s], degree(s)};
    }

    // Index of the edge s -> to within row s, or npos.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t find_edge(StateId s, StateId to) const;

    StateId lookup(std::string_view string_form) const;  // kNoState if absent

    // The word this state emits when rendered ("." for the start state;
    // the second member for order-2 states).
    std::string_view render(StateId s) const;

    // Validates invariants and computes derived fields and the digest.
    // Throws MalformedModelFile or DegenerateModel.
    void finalize();
};

// Estimates a model from tokenized sentences. Every sentence is padded
// with the start state at both ends, so a sentence of length L
// contributes L + 1 transitions. Throws DegenerateModel when the corpus
// has fewer than two distinct sentence-initial words.
MarkovModel build_model(const std::vector<Sentence>& sentences, int order);

// Canonical, versioned binary form. Two equal models serialize to
// identical bytes; counts are stored, probabilities never are.
std::vector<std::uint8_t> serialize_model(const MarkovModel& model);
MarkovModel deserialize_model(std::span<const std::uint8_t> bytes);

// Digest of the canonical serialization (FNV-1a 64).
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

// Maps tokenized sentences back onto the state path that renders them:
// words become states (pair states for order 2) and every sentence end
// becomes the start state. Throws StateNotInPartition on foreign words.
std::vector<StateId> states_from_sentences(const MarkovModel& model,
                                           const std::vector<Sentence>& sentences);

}  // namespace stegomark
