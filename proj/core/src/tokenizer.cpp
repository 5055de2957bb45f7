#include "stegomark/tokenizer.hpp"

namespace stegomark {

namespace {

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Characters a token may contain, apart from hyphens.
bool is_word_char(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u >= 0x80) return true;  // keep multi-byte sequences intact
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '\'';
}

}  // namespace

bool is_valid_token(std::string_view text) {
    if (text.empty()) return false;
    for (char c : text)
        if (!is_word_char(c) && c != '-') return false;
    if (text.front() == '-' || text.back() == '-') return false;
    return true;
}

std::vector<Sentence> tokenize(std::string_view corpus) {
    std::vector<Sentence> sentences;
    Sentence sentence;
    Token token;

    auto end_token = [&] {
        if (!token.empty()) {
            sentence.push_back(std::move(token));
            token.clear();
        }
    };
    auto end_sentence = [&] {
        end_token();
        if (!sentence.empty()) {
            sentences.push_back(std::move(sentence));
            sentence.clear();
        }
    };

    for (std::size_t i = 0; i < corpus.size(); ++i) {
        char c = corpus[i];
        if (is_sentence_end(c)) {
            end_sentence();
        } else if (is_space(c)) {
            end_token();
        } else if (is_word_char(c)) {
            token.push_back(c);
        } else if (c == '-') {
            // internal hyphens only: need a kept char on both sides
            if (!token.empty() && i + 1 < corpus.size() && is_word_char(corpus[i + 1]))
                token.push_back(c);
        }
        // every other character is stripped
    }
    end_sentence();
    return sentences;
}

}  // namespace stegomark
