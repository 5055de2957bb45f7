#pragma once

#include <span>
#include <string>
#include <string_view>

#include "stegomark/model.hpp"

namespace stegomark::fixture {

// Hand-built nine-state chain (start plus s1..s8) used throughout the
// tests as a cross-implementation oracle. Transition probabilities:
//   start -> s1, s2        at 1/2, 1/2
//   s1    -> s3, s4        at 1/4, 3/4
//   s2    -> s4, s5        at 1/4, 3/4
//   s4    -> s6, s7        at 1/4, 3/4
//   s5    -> s7, s8        at 1/5, 4/5
//   s3, s6, s7, s8 -> start at 1
MarkovModel chain();

// A 40-sentence corpus engineered so build_model() reproduces chain()'s
// probabilities exactly (counts scale by 5; every partition is scale
// invariant, so the two models encode identically).
std::string corpus();

// The canonical fixed-size encodings of every input up to 4 bits plus
// the two 5-bit corner cases, with "." marking the start state. Replaying
// these is the keystone compatibility test of the repository.
struct ExpectedEncoding {
    std::string_view bits;    // input, MSB first
    std::string_view states;  // space-joined expected state path
};
std::span<const ExpectedEncoding> expected_encodings();

}  // namespace stegomark::fixture
