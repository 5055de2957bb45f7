#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stegomark/model.hpp"

namespace stegomark {

enum class CoderMode { exact, windowed };

// Everything both parties must agree on besides the model itself.
struct CodecConfig {
    std::uint64_t model_digest = 0;  // 0 skips the check
    unsigned header_bits = 32;       // m: payload bit length is framed in m bits
    CoderMode mode = CoderMode::windowed;
    unsigned precision = 32;         // windowed quota width, 2..63
    StateId start = kStartState;
};

// A generated carrier text: the state path plus its rendering. Every
// adjacent state pair has positive probability in the model, and
// tokenizing the rendering recovers the path.
struct StegoText {
    std::vector<StateId> states;
    std::string rendering;
};

struct DecodedBits {
    std::vector<std::uint8_t> bytes;    // ceil(bit_count / 8), final byte zero-padded
    std::size_t states_consumed = 0;    // prefix of the text that carried the value
};

// Encodes the leading `bit_count` bits of `data` (MSB-first, i.e. the
// data is one big-endian number) into a state path starting from
// `start`. The walk repeatedly partitions the current range among the
// outbound states and descends into the subrange holding the number,
// stopping once the range pins a single value. Injective for a fixed
// bit_count.
std::vector<StateId> encode_fixed(const MarkovModel& model,
                                  std::span<const std::uint8_t> data,
                                  std::uint64_t bit_count, StateId start,
                                  CoderMode mode = CoderMode::exact,
                                  unsigned precision = 32);

// Value form for bit counts up to 63 (headers, tests).
std::vector<StateId> encode_fixed_value(const MarkovModel& model, std::uint64_t value,
                                        unsigned bit_count, StateId start,
                                        CoderMode mode = CoderMode::exact,
                                        unsigned precision = 32);

// Replays a state path to recover the bit_count-bit value. States past
// the point of convergence are ignored, so any model-admissible text may
// be appended without changing the result. Throws StateNotInPartition
// for foreign texts and TextExhausted when the path ends early.
DecodedBits decode_fixed(const MarkovModel& model, std::span<const StateId> text,
                         std::uint64_t bit_count, StateId start,
                         CoderMode mode = CoderMode::exact, unsigned precision = 32);

// Variable-size framing: an m-bit header carrying the payload bit length
// (bit-reversed so short payloads do not all start with the same words),
// the payload continued from the header's last word, and a random
// sentence-completing tail. decode() inverts everything up to the tail.
StegoText encode(const MarkovModel& model, std::span<const std::uint8_t> payload,
                 const CodecConfig& config,
                 std::optional<std::uint64_t> seed = std::nullopt);

std::vector<std::uint8_t> decode(const MarkovModel& model,
                                 std::span<const StateId> states,
                                 const CodecConfig& config);

// Convenience: tokenizes the rendering first.
std::vector<std::uint8_t> decode_text(const MarkovModel& model, std::string_view text,
                                      const CodecConfig& config);

// Random walk from `from`, sampling successors by probability until the
// start state closes the sentence. The walk only takes a random step
// while a forced finish along the shortest path to start would still fit
// within max_states; deterministic for a fixed seed.
std::vector<StateId> random_text(const MarkovModel& model, StateId from,
                                 std::optional<std::uint64_t> seed = std::nullopt,
                                 std::size_t max_states = 50);

// Renders a state path: words joined by spaces, the start state drawn as
// a period attached to the preceding word, and a closing period when the
// path ends mid-sentence.
std::string detokenize(const MarkovModel& model, std::span<const StateId> states);

// Inverse of detokenize for admissible texts (a trailing start state is
// appended if the text ends mid-sentence, which decoding ignores).
std::vector<StateId> states_from_text(const MarkovModel& model, std::string_view text);

}  // namespace stegomark
