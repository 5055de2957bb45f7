#include "stegomark/fixture.hpp"

#include <array>

namespace stegomark::fixture {

MarkovModel chain() {
    MarkovModel m;
    m.order = 1;
    m.states = {".", "s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8"};

    struct E {
        StateId from, to;
        std::uint64_t count;
    };
    constexpr std::array<E, 14> edges{{
        {0, 1, 1}, {0, 2, 1},            // start: 1/2, 1/2
        {1, 3, 1}, {1, 4, 3},            // s1: 1/4, 3/4
        {2, 4, 1}, {2, 5, 3},            // s2: 1/4, 3/4
        {3, 0, 1},                       // s3 -> start
        {4, 6, 1}, {4, 7, 3},            // s4: 1/4, 3/4
        {5, 7, 1}, {5, 8, 4},            // s5: 1/5, 4/5
        {6, 0, 1}, {7, 0, 1}, {8, 0, 1}, // s6, s7, s8 -> start
    }};

    m.row_begin.assign(m.states.size() + 1, 0);
    for (const auto& e : edges) m.row_begin[e.from + 1]++;
    for (std::size_t s = 0; s < m.states.size(); ++s) m.row_begin[s + 1] += m.row_begin[s];
    for (const auto& e : edges) {  // already listed in (from, to) order
        m.edge_to.push_back(e.to);
        m.edge_count.push_back(e.count);
    }
    m.finalize();
    return m;
}

std::string corpus() {
    // Sentence multiplicities solve the flow equations so every row's
    // count ratios equal chain()'s (s5 needs an out-total divisible by 5,
    // which forces 40 sentences).
    struct Line {
        const char* sentence;
        int repeat;
    };
    constexpr std::array<Line, 6> lines{{
        {"s1 s3.", 5},
        {"s1 s4 s6.", 5},
        {"s1 s4 s7.", 10},
        {"s2 s4 s7.", 5},
        {"s2 s5 s7.", 3},
        {"s2 s5 s8.", 12},
    }};
    std::string out;
    for (const auto& line : lines)
        for (int i = 0; i < line.repeat; ++i) {
            out += line.sentence;
            out += ' ';
        }
    return out;
}

std::span<const ExpectedEncoding> expected_encodings() {
    static constexpr std::array<ExpectedEncoding, 32> rows{{
        {"0", "s1"},
        {"1", "s2"},
        {"00", "s1 s3"},
        {"01", "s1 s4"},
        {"10", "s2 s4"},
        {"11", "s2 s5"},
        {"000", "s1 s3"},
        {"001", "s1 s4 s6"},
        {"010", "s1 s4 s7 . s1"},
        {"011", "s1 s4 s7 . s2"},
        {"100", "s2 s4"},
        {"101", "s2 s5 s7"},
        {"110", "s2 s5 s8 . s1"},
        {"111", "s2 s5 s8 . s2"},
        {"0000", "s1 s3 . s1"},
        {"0001", "s1 s3 . s2"},
        {"0010", "s1 s4 s6 . s1"},
        {"0011", "s1 s4 s6 . s2"},
        {"0100", "s1 s4 s7 . s1 s3"},
        {"0101", "s1 s4 s7 . s1 s4"},
        {"0110", "s1 s4 s7 . s2 s4"},
        {"0111", "s1 s4 s7 . s2 s5"},
        {"1000", "s2 s4 s6"},
        {"1001", "s2 s4 s7"},
        {"1010", "s2 s5 s7"},
        {"1011", "s2 s5 s8 . s1 s3"},
        {"1100", "s2 s5 s8 . s1 s4 s6"},
        {"1101", "s2 s5 s8 . s1 s4 s7"},
        {"1110", "s2 s5 s8 . s2 s4"},
        {"1111", "s2 s5 s8 . s2 s5"},
        {"00000", "s1 s3 . s1 s3"},
        {"11111", "s2 s5 s8 . s2 s5 s8 . s2"},
    }};
    return rows;
}

}  // namespace stegomark::fixture
