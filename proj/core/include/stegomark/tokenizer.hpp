#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stegomark {

using Token = std::string;
using Sentence = std::vector<Token>;

// Splits a corpus into sentences of tokens.
//
// Rules: sentences end at '.', '!' or '?'; tokens are separated by
// whitespace; letters, digits, apostrophes and bytes >= 0x80 (so UTF-8
// sequences survive) are kept; '-' is kept only between two kept
// characters; everything else is stripped. Case is preserved. Empty
// tokens and empty sentences are dropped.
std::vector<Sentence> tokenize(std::string_view corpus);

bool is_valid_token(std::string_view text);

}  // namespace stegomark
