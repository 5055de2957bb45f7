#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "stegomark/detail/apportion.hpp"
#include "stegomark/model.hpp"
#include "stegomark/range.hpp"

namespace stegomark {

// Ordered, contiguous partition of a parent range: entry i+1 starts at
// entry i's hi + 1, the first entry starts at the parent's lo and the
// last ends at its hi. Entries follow canonical state order and only
// list states that received at least one number.
using SubrangeMap = std::vector<std::pair<StateId, NatRange>>;

// Splits total_length units among weighted entries in proportion to
// weight/denominator, by the same largest-remainder rule subranges uses.
// Weights must be positive, sum to denominator and come in canonical
// order. Returns the unit count per entry (zeros included).
std::vector<std::pair<StateId, mpz_class>> apportion(
    std::span<const std::pair<StateId, std::uint64_t>> weights,
    std::uint64_t denominator, const mpz_class& total_length);

// Partitions r among the outbound states of s in proportion to their
// transition probabilities. A state with a single outbound edge passes
// the whole range through. Whenever s branches and r has at least two
// numbers, the result has at least two entries, so iterated partitioning
// always shrinks ranges (Condition of Minimal Length).
//
// Throws NoOutboundState if s has no outbound edges, and
// std::invalid_argument if s branches but r is a unit range (the coding
// loops stop at unit ranges before ever asking for such a split).
SubrangeMap subranges(const MarkovModel& model, StateId s, const NatRange& r);

// The subrange assigned to s_next inside subranges(model, s, r).
// Throws StateNotInPartition when s_next got no subrange.
NatRange subrange_for_state(const MarkovModel& model, StateId s, const NatRange& r,
                            StateId s_next);

// The unique entry whose subrange contains number (state / range form).
// Throws NumberOutOfRange when number lies outside r.
NatRange subrange_for_number(const MarkovModel& model, StateId s, const NatRange& r,
                             const mpz_class& number);
StateId state_for_number(const MarkovModel& model, StateId s, const NatRange& r,
                         const mpz_class& number);

}  // namespace stegomark
