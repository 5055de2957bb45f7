#pragma once

#include <stdexcept>
#include <string>

namespace stegomark {

// Base class for every error this library raises on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Corpus produced a chain the coder cannot make progress on (the start
// state has fewer than two outbound states).
struct DegenerateModel : Error {
    using Error::Error;
};

// A model file failed structural validation; the message carries a byte
// offset or field name for diagnosis.
struct MalformedModelFile : Error {
    using Error::Error;
};

// A state with no outbound edges was asked for a partition. Models built
// from a corpus never contain such states.
struct NoOutboundState : Error {
    using Error::Error;
};

// While decoding, a state was not found in the partition of its
// predecessor. The text was not produced by this model/configuration.
struct StateNotInPartition : Error {
    using Error::Error;
};

struct NumberOutOfRange : Error {
    using Error::Error;
};

// The state sequence ended before the range converged to a single value.
struct TextExhausted : Error {
    using Error::Error;
};

// Payload bit length does not fit in the configured header width.
struct PayloadTooLarge : Error {
    using Error::Error;
};

// Decoded header is not usable (e.g. bit length not a whole byte count).
struct BadHeader : Error {
    using Error::Error;
};

// Loaded model does not match the digest the counterparty recorded.
struct ConfigMismatch : Error {
    using Error::Error;
};

}  // namespace stegomark
