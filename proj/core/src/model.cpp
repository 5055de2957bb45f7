#include "stegomark/model.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

#include "stegomark/errors.hpp"

namespace stegomark {

namespace {

constexpr std::uint64_t kCountCap = std::uint64_t{1} << 63;

constexpr char kMagic[4] = {'M', 'K', 'S', 'M'};
constexpr std::uint16_t kFormatVersion = 1;

void append_le(std::vector<std::uint8_t>& out, std::uint64_t v, unsigned bytes) {
    for (unsigned i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Cursor {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    std::uint64_t take_le(unsigned n, const char* field) {
        if (bytes.size() - pos < n)
            throw MalformedModelFile("model file truncated at byte " + std::to_string(pos) +
                                     " while reading " + field);
        std::uint64_t v = 0;
        for (unsigned i = 0; i < n; ++i) v |= std::uint64_t{bytes[pos + i]} << (8 * i);
        pos += n;
        return v;
    }

    std::string take_string(std::size_t n, const char* field) {
        if (bytes.size() - pos < n)
            throw MalformedModelFile("model file truncated at byte " + std::to_string(pos) +
                                     " while reading " + field);
        std::string s(reinterpret_cast<const char*>(bytes.data() + pos), n);
        pos += n;
        return s;
    }
};

}  // namespace

std::size_t MarkovModel::find_edge(StateId s, StateId to) const {
    auto row = successors(s);
    auto it = std::lower_bound(row.begin(), row.end(), to);
    if (it == row.end() || *it != to) return npos;
    return row_begin[s] + static_cast<std::size_t>(it - row.begin());
}

StateId MarkovModel::lookup(std::string_view string_form) const {
    auto it = index.find(std::string(string_form));
    return it == index.end() ? kNoState : it->second;
}

std::string_view MarkovModel::render(StateId s) const {
    if (s == kStartState) return kStartMarker;
    std::string_view form = states[s];
    if (order == 1) return form;
    auto space = form.find(' ');
    return form.substr(space + 1);
}

void MarkovModel::finalize() {
    const std::size_t n = states.size();
    if (n == 0 || states[0] != kStartMarker)
        throw MalformedModelFile("state 0 must be the start marker");
    for (std::size_t i = 2; i < n; ++i)
        if (!(states[i - 1] < states[i]))
            throw MalformedModelFile("states out of canonical order near index " +
                                     std::to_string(i));
    if (n >= 2 && states[1] == kStartMarker)
        throw MalformedModelFile("duplicate start marker state");
    if (row_begin.size() != n + 1 || row_begin[0] != 0 || row_begin[n] != edge_to.size())
        throw MalformedModelFile("row index table is inconsistent");

    out_total.assign(n, 0);
    edge_csum.assign(edge_to.size(), 0);
    for (std::size_t s = 0; s < n; ++s) {
        if (row_begin[s] > row_begin[s + 1])
            throw MalformedModelFile("row index table is not monotone");
        std::uint64_t total = 0;
        for (std::size_t e = row_begin[s]; e < row_begin[s + 1]; ++e) {
            if (edge_to[e] >= n)
                throw MalformedModelFile("edge target out of range in row " + std::to_string(s));
            if (e > row_begin[s] && edge_to[e] <= edge_to[e - 1])
                throw MalformedModelFile("edges unsorted or duplicated in row " +
                                         std::to_string(s));
            if (edge_count[e] == 0)
                throw MalformedModelFile("zero edge count in row " + std::to_string(s));
            edge_csum[e] = total;
            if (edge_count[e] >= kCountCap - total)
                throw MalformedModelFile("outbound counts overflow in row " + std::to_string(s));
            total += edge_count[e];
        }
        out_total[s] = total;
        if (total == 0)
            throw MalformedModelFile("state " + std::to_string(s) + " has no outbound edges");
    }
    if (degree(kStartState) < 2)
        throw DegenerateModel(
            "start state has fewer than 2 outbound states; the coder could never make progress");

    // Reverse BFS from start: distance of every state to start, plus a
    // deterministic next hop (smallest successor that decreases the
    // distance). Also proves start is reachable from everywhere.
    std::vector<std::vector<StateId>> rev(n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t e = row_begin[s]; e < row_begin[s + 1]; ++e)
            rev[edge_to[e]].push_back(static_cast<StateId>(s));
    constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();
    dist_to_start.assign(n, kUnreached);
    std::deque<StateId> queue;
    // distance counts transitions; start itself needs a full cycle, but
    // for navigation we only ever ask from non-start states.
    dist_to_start[kStartState] = 0;
    queue.push_back(kStartState);
    while (!queue.empty()) {
        StateId cur = queue.front();
        queue.pop_front();
        for (StateId p : rev[cur]) {
            if (dist_to_start[p] == kUnreached) {
                dist_to_start[p] = dist_to_start[cur] + 1;
                queue.push_back(p);
            }
        }
    }
    hop_to_start.assign(n, kNoState);
    for (std::size_t s = 0; s < n; ++s) {
        if (s != kStartState && dist_to_start[s] == kUnreached)
            throw MalformedModelFile("state " + std::to_string(s) + " cannot reach start");
        for (StateId to : successors(static_cast<StateId>(s))) {
            if (dist_to_start[to] + 1 == dist_to_start[s]) {
                hop_to_start[s] = to;
                break;  // successors are sorted, first hit is canonical
            }
        }
    }

    // Forward reachability from start.
    std::vector<char> seen(n, 0);
    seen[kStartState] = 1;
    queue.push_back(kStartState);
    while (!queue.empty()) {
        StateId cur = queue.front();
        queue.pop_front();
        for (StateId to : successors(cur)) {
            if (!seen[to]) {
                seen[to] = 1;
                queue.push_back(to);
            }
        }
    }
    for (std::size_t s = 0; s < n; ++s)
        if (!seen[s])
            throw MalformedModelFile("state " + std::to_string(s) + " unreachable from start");

    index.clear();
    index.reserve(n);
    for (std::size_t s = 0; s < n; ++s) index.emplace(states[s], static_cast<StateId>(s));

    digest = 0;  // serialize_model reads the model; compute digest after
    digest = fnv1a64(serialize_model(*this));
}

MarkovModel build_model(const std::vector<Sentence>& sentences, int order) {
    if (order != 1 && order != 2) throw std::invalid_argument("order must be 1 or 2");
    if (sentences.empty()) throw std::invalid_argument("corpus has no sentences");

    for (const auto& sentence : sentences) {
        if (sentence.empty()) throw std::invalid_argument("empty sentence");
        for (const auto& token : sentence)
            if (!is_valid_token(token))
                throw std::invalid_argument("invalid token: '" + token + "'");
    }

    // Collect state string forms, then assign canonical ids.
    std::vector<std::string> forms;
    for (const auto& sentence : sentences) {
        if (order == 1) {
            for (const auto& token : sentence) forms.push_back(token);
        } else {
            forms.push_back(std::string(kStartMarker) + " " + sentence[0]);
            for (std::size_t i = 1; i < sentence.size(); ++i)
                forms.push_back(sentence[i - 1] + " " + sentence[i]);
        }
    }
    std::sort(forms.begin(), forms.end());
    forms.erase(std::unique(forms.begin(), forms.end()), forms.end());

    MarkovModel model;
    model.order = static_cast<std::uint8_t>(order);
    model.states.reserve(forms.size() + 1);
    model.states.emplace_back(kStartMarker);
    for (auto& f : forms) model.states.push_back(std::move(f));

    std::unordered_map<std::string, StateId> ids;
    ids.reserve(model.states.size());
    for (std::size_t i = 0; i < model.states.size(); ++i)
        ids.emplace(model.states[i], static_cast<StateId>(i));

    // Count transitions along every start -> ... -> start sentence path.
    std::map<std::pair<StateId, StateId>, std::uint64_t> edges;
    for (const auto& sentence : sentences) {
        StateId prev = kStartState;
        for (std::size_t i = 0; i < sentence.size(); ++i) {
            std::string form;
            if (order == 1)
                form = sentence[i];
            else if (i == 0)
                form = std::string(kStartMarker) + " " + sentence[0];
            else
                form = sentence[i - 1] + " " + sentence[i];
            StateId cur = ids.at(form);
            ++edges[{prev, cur}];
            prev = cur;
        }
        ++edges[{prev, kStartState}];
    }

    model.row_begin.assign(model.states.size() + 1, 0);
    for (const auto& [key, count] : edges) model.row_begin[key.first + 1]++;
    for (std::size_t s = 0; s < model.states.size(); ++s)
        model.row_begin[s + 1] += model.row_begin[s];
    model.edge_to.reserve(edges.size());
    model.edge_count.reserve(edges.size());
    for (const auto& [key, count] : edges) {  // std::map iterates in (from, to) order
        model.edge_to.push_back(key.second);
        model.edge_count.push_back(count);
    }

    model.finalize();
    return model;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::vector<std::uint8_t> serialize_model(const MarkovModel& model) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    append_le(out, kFormatVersion, 2);
    append_le(out, model.order, 1);
    append_le(out, model.states.size(), 8);
    for (const auto& s : model.states) {
        append_le(out, s.size(), 4);
        out.insert(out.end(), s.begin(), s.end());
    }
    append_le(out, model.edge_to.size(), 8);
    for (std::size_t s = 0; s < model.states.size(); ++s) {
        for (std::size_t e = model.row_begin[s]; e < model.row_begin[s + 1]; ++e) {
            append_le(out, s, 8);
            append_le(out, model.edge_to[e], 8);
            append_le(out, model.edge_count[e], 8);
        }
    }
    return out;
}

MarkovModel deserialize_model(std::span<const std::uint8_t> bytes) {
    Cursor in{bytes};
    char magic[4];
    for (char& c : magic) c = static_cast<char>(in.take_le(1, "magic"));
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw MalformedModelFile("bad magic bytes; not a model file");
    auto version = in.take_le(2, "version");
    if (version != kFormatVersion)
        throw MalformedModelFile("unsupported format version " + std::to_string(version));
    auto order = in.take_le(1, "order");
    if (order != 1 && order != 2)
        throw MalformedModelFile("order must be 1 or 2, found " + std::to_string(order));

    MarkovModel model;
    model.order = static_cast<std::uint8_t>(order);
    auto state_count = in.take_le(8, "state count");
    if (state_count > bytes.size())  // each state needs at least its length field
        throw MalformedModelFile("state count " + std::to_string(state_count) +
                                 " exceeds file size");
    model.states.reserve(state_count);
    for (std::uint64_t i = 0; i < state_count; ++i) {
        auto len = in.take_le(4, "state length");
        auto s = in.take_string(len, "state string");
        if (s.empty()) throw MalformedModelFile("empty state string at index " + std::to_string(i));
        model.states.push_back(std::move(s));
    }

    auto edge_total = in.take_le(8, "edge count");
    if (edge_total > bytes.size() / 8)
        throw MalformedModelFile("edge count " + std::to_string(edge_total) +
                                 " exceeds file size");
    model.row_begin.assign(state_count + 1, 0);
    model.edge_to.reserve(edge_total);
    model.edge_count.reserve(edge_total);
    std::uint64_t prev_from = 0, prev_to = 0;
    for (std::uint64_t e = 0; e < edge_total; ++e) {
        auto from = in.take_le(8, "edge source");
        auto to = in.take_le(8, "edge target");
        auto count = in.take_le(8, "edge count value");
        if (from >= state_count || to >= state_count)
            throw MalformedModelFile("edge " + std::to_string(e) + " references unknown state");
        if (e > 0 && (from < prev_from || (from == prev_from && to <= prev_to)))
            throw MalformedModelFile("edge " + std::to_string(e) + " out of (from, to) order");
        prev_from = from;
        prev_to = to;
        model.row_begin[from + 1]++;
        model.edge_to.push_back(static_cast<StateId>(to));
        model.edge_count.push_back(count);
    }
    if (in.pos != bytes.size())
        throw MalformedModelFile("trailing bytes after edge table at byte " +
                                 std::to_string(in.pos));
    for (std::uint64_t s = 0; s < state_count; ++s) model.row_begin[s + 1] += model.row_begin[s];

    model.finalize();
    return model;
}

std::vector<StateId> states_from_sentences(const MarkovModel& model,
                                           const std::vector<Sentence>& sentences) {
    std::vector<StateId> path;
    for (const auto& sentence : sentences) {
        std::string_view prev = kStartMarker;
        for (const auto& token : sentence) {
            StateId id;
            if (model.order == 1) {
                id = model.lookup(token);
            } else {
                id = model.lookup(std::string(prev) + " " + token);
            }
            if (id == kNoState)
                throw StateNotInPartition("word '" + token + "' does not continue any state path");
            path.push_back(id);
            prev = token;
        }
        path.push_back(kStartState);
    }
    return path;
}

}  // namespace stegomark
