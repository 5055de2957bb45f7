#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stegomark/tokenizer.hpp"

using namespace stegomark;

namespace {
std::vector<Sentence> S(std::initializer_list<Sentence> s) { return {s}; }
}  // namespace

TEST_CASE("sentences split on terminators, tokens on whitespace") {
    CHECK(tokenize("He had been her neighbors. Under a largish piece.") ==
          S({{"He", "had", "been", "her", "neighbors"}, {"Under", "a", "largish", "piece"}}));
    CHECK(tokenize("a b? a!") == S({{"a", "b"}, {"a"}}));
    CHECK(tokenize("") == S({}));
    CHECK(tokenize("   \n\t ") == S({}));
    CHECK(tokenize("...!?") == S({}));
}

TEST_CASE("line breaks and repeated whitespace are plain separators") {
    CHECK(tokenize("one\ntwo\r\nthree.") == S({{"one", "two", "three"}}));
    CHECK(tokenize("a   b.") == S({{"a", "b"}}));
    CHECK(tokenize("a b.. c.") == S({{"a", "b"}, {"c"}}));
}

TEST_CASE("case and digits are preserved, punctuation is stripped") {
    CHECK(tokenize("Be be BE.") == S({{"Be", "be", "BE"}}));
    CHECK(tokenize("In 1805 Anna (the elder) spoke;") ==
          S({{"In", "1805", "Anna", "the", "elder", "spoke"}}));
    CHECK(tokenize("\"quoted\" words,") == S({{"quoted", "words"}}));
}

TEST_CASE("apostrophes always survive, hyphens only between kept characters") {
    CHECK(tokenize("He's the cows' 'tis.") == S({{"He's", "the", "cows'", "'tis"}}));
    CHECK(tokenize("state-of-the-art.") == S({{"state-of-the-art"}}));
    CHECK(tokenize("rock- roll -n a-b7.") == S({{"rock", "roll", "n", "a-b7"}}));
    // a dangling hyphen between stripped characters disappears
    CHECK(tokenize("x -( y.") == S({{"x", "y"}}));
}

TEST_CASE("bytes beyond ASCII pass through so UTF-8 words stay whole") {
    auto got = tokenize("caf\xc3\xa9 na\xc3\xafve.");
    REQUIRE(got.size() == 1);
    CHECK(got[0] == Sentence{"caf\xc3\xa9", "na\xc3\xafve"});
}

TEST_CASE("token validity") {
    CHECK(is_valid_token("He's"));
    CHECK(is_valid_token("a-b"));
    CHECK(is_valid_token("1805"));
    CHECK_FALSE(is_valid_token(""));
    CHECK_FALSE(is_valid_token("."));
    CHECK_FALSE(is_valid_token("two words"));
    CHECK_FALSE(is_valid_token("-edge"));
    CHECK_FALSE(is_valid_token("edge-"));
    CHECK_FALSE(is_valid_token("que?"));
}
