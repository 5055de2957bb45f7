// stegomark: hide binary data in generated text driven by a Markov model.

#include <CLI11.hpp>
#include <json.hpp>
#include <zlib.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "stegomark/codec.hpp"
#include "stegomark/errors.hpp"
#include "stegomark/fixture.hpp"
#include "stegomark/model.hpp"
#include "stegomark/partition.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stegomark;

namespace {

// Exit codes: tooling depends on these staying distinct.
constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDecode = 3;
constexpr int kExitModel = 4;
constexpr int kExitUsage = 5;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed on '" + path + "'");
    return data;
}

std::string read_text(const std::string& path) {
    auto bytes = read_bytes(path);
    return std::string(bytes.begin(), bytes.end());
}

void write_bytes(const std::string& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed on '" + path + "'");
}

void write_text(const std::string& path, std::string_view text) {
    write_bytes(path, std::span<const std::uint8_t>(
                          reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string digest_hex(std::uint64_t digest) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

// Greedy wrap at spaces; never splits a word, so tokenization (and
// therefore decoding) is unaffected.
std::string wrap_text(const std::string& text, unsigned cols) {
    if (cols == 0) return text;
    std::string out;
    std::size_t line = 0;
    std::istringstream words(text);
    std::string word;
    while (words >> word) {
        if (line == 0) {
            out += word;
            line = word.size();
        } else if (line + 1 + word.size() <= cols) {
            out += ' ';
            out += word;
            line += 1 + word.size();
        } else {
            out += '\n';
            out += word;
            line = word.size();
        }
    }
    return out;
}

struct CodecFlags {
    unsigned header_bits = 32;
    std::string mode = "windowed";
    unsigned precision = 32;

    CodecConfig to_config(const MarkovModel& model) const {
        CodecConfig cfg;
        cfg.header_bits = header_bits;
        cfg.mode = mode == "exact" ? CoderMode::exact : CoderMode::windowed;
        cfg.precision = precision;
        cfg.model_digest = model.digest;
        return cfg;
    }
};

void add_codec_flags(CLI::App* cmd, CodecFlags& flags) {
    cmd->add_option("--header-bits", flags.header_bits,
                    "Header width in bits; bounds the payload size")
        ->check(CLI::Range(1u, 63u))
        ->capture_default_str();
    cmd->add_option("--mode", flags.mode, "Coder arithmetic")
        ->check(CLI::IsMember({"exact", "windowed"}))
        ->capture_default_str();
    cmd->add_option("--precision", flags.precision, "Window width for --mode windowed")
        ->check(CLI::Range(2u, 63u))
        ->capture_default_str();
}

json manifest_json(const MarkovModel& model, const CodecFlags& flags) {
    return json{{"model_digest", digest_hex(model.digest)},
                {"order", model.order},
                {"header_bits", flags.header_bits},
                {"mode", flags.mode},
                {"precision", flags.precision}};
}

// Applies a manifest: the digest must match the loaded model, and any
// codec flag the user did not pass explicitly is adopted from it.
void apply_manifest(const json& m, const MarkovModel& model, CLI::App* cmd,
                    CodecFlags& flags) {
    if (m.contains("model_digest") &&
        m["model_digest"].get<std::string>() != digest_hex(model.digest))
        throw ConfigMismatch("manifest was written for model digest " +
                             m["model_digest"].get<std::string>() + ", loaded model is " +
                             digest_hex(model.digest));
    if (cmd->count("--header-bits") == 0 && m.contains("header_bits"))
        flags.header_bits = m["header_bits"].get<unsigned>();
    if (cmd->count("--mode") == 0 && m.contains("mode"))
        flags.mode = m["mode"].get<std::string>();
    if (cmd->count("--precision") == 0 && m.contains("precision"))
        flags.precision = m["precision"].get<unsigned>();
}

MarkovModel load_model(const std::string& path) {
    return deserialize_model(read_bytes(path));
}

double deflated_size(const std::string& text) {
    uLongf bound = compressBound(static_cast<uLong>(text.size()));
    std::vector<Bytef> buf(bound);
    if (compress2(buf.data(), &bound, reinterpret_cast<const Bytef*>(text.data()),
                  static_cast<uLong>(text.size()), Z_DEFAULT_COMPRESSION) != Z_OK)
        throw IoError("deflate failed");
    return static_cast<double>(bound);
}

int cmd_build_model(const std::string& corpus_path, const std::string& out_path,
                    int order) {
    const std::string corpus = read_text(corpus_path);
    auto sentences = tokenize(corpus);
    auto model = build_model(sentences, order);
    write_bytes(out_path, serialize_model(model));
    std::cout << "model: " << out_path << "\n"
              << "  order " << int(model.order) << ", " << model.state_count()
              << " states, " << model.edge_count_total() << " edges, digest "
              << digest_hex(model.digest) << "\n";
    return kExitOk;
}

int cmd_encode(CLI::App* cmd, const std::string& model_path, const std::string& in_path,
               const std::string& out_path, CodecFlags& flags,
               std::optional<std::uint64_t> seed, unsigned wrap,
               const std::string& manifest_path) {
    auto model = load_model(model_path);
    if (!manifest_path.empty() && fs::exists(manifest_path))
        apply_manifest(json::parse(read_text(manifest_path)), model, cmd, flags);
    auto payload = read_bytes(in_path);
    auto stego = encode(model, payload, flags.to_config(model), seed);
    write_text(out_path, wrap_text(stego.rendering, wrap) + "\n");
    if (!manifest_path.empty())
        write_text(manifest_path, manifest_json(model, flags).dump(2) + "\n");
    std::cout << "encoded " << payload.size() << " bytes into " << stego.states.size()
              << " words (" << fs::file_size(out_path) << " bytes of text)\n";
    return kExitOk;
}

int cmd_decode(CLI::App* cmd, const std::string& model_path, const std::string& in_path,
               const std::string& out_path, CodecFlags& flags,
               const std::string& manifest_path) {
    auto model = load_model(model_path);
    std::string manifest = manifest_path;
    if (manifest.empty() && fs::exists(in_path + ".manifest.json"))
        manifest = in_path + ".manifest.json";
    if (!manifest.empty()) {
        if (!fs::exists(manifest)) throw IoError("manifest '" + manifest + "' not found");
        apply_manifest(json::parse(read_text(manifest)), model, cmd, flags);
    }
    auto payload = decode_text(model, read_text(in_path), flags.to_config(model));
    write_bytes(out_path, payload);
    std::cout << "decoded " << payload.size() << " bytes\n";
    return kExitOk;
}

int cmd_bench(const std::string& model_path, const std::string& sizes_csv,
              CodecFlags& flags, std::uint64_t seed) {
    using Clock = std::chrono::steady_clock;
    auto model = load_model(model_path);
    std::cout << "model digest " << digest_hex(model.digest) << ", order "
              << int(model.order) << ", " << model.state_count() << " states\n"
              << "mode " << flags.mode << ", precision " << flags.precision
              << ", header-bits " << flags.header_bits << ", seed " << seed << "\n";
    std::printf("%10s %10s %7s %10s %7s %10s %10s\n", "input B", "text B", "ratio",
                "deflate B", "zratio", "enc kB/s", "dec kB/s");

    std::vector<std::size_t> sizes;
    for (auto& field : CLI::detail::split(sizes_csv, ','))
        sizes.push_back(std::stoull(field));

    std::mt19937_64 gen(seed);
    auto cfg = flags.to_config(model);
    for (std::size_t size : sizes) {
        std::vector<std::uint8_t> payload(size);
        for (auto& b : payload) b = static_cast<std::uint8_t>(gen());
        const auto t0 = Clock::now();
        auto stego = encode(model, payload, cfg, seed);
        const auto t1 = Clock::now();
        auto back = decode(model, stego.states, cfg);
        const auto t2 = Clock::now();
        if (back != payload) throw Error("round trip failed at size " + std::to_string(size));
        const double enc_s = std::chrono::duration<double>(t1 - t0).count();
        const double dec_s = std::chrono::duration<double>(t2 - t1).count();
        const double text_size = static_cast<double>(stego.rendering.size());
        std::printf("%10zu %10zu %7.2f %10.0f %7.2f %10.1f %10.1f\n", size,
                    stego.rendering.size(), text_size / size, deflated_size(stego.rendering),
                    deflated_size(stego.rendering) / size, size / 1000.0 / enc_s,
                    size / 1000.0 / dec_s);
    }
    return kExitOk;
}

int cmd_selftest() {
    auto model = fixture::chain();
    int failures = 0;
    auto report = [&](const char* name, bool ok) {
        std::cout << (ok ? "pass" : "FAIL") << "  " << name << "\n";
        if (!ok) ++failures;
    };

    bool replay = true;
    for (const auto& row : fixture::expected_encodings()) {
        std::uint64_t value = 0;
        for (char c : row.bits) value = value * 2 + static_cast<unsigned>(c - '0');
        auto got = encode_fixed_value(model, value, static_cast<unsigned>(row.bits.size()),
                                      kStartState, CoderMode::exact);
        std::string rendered;
        for (auto s : got) {
            if (!rendered.empty()) rendered += ' ';
            rendered += s == kStartState ? "." : model.states[s];
        }
        replay = replay && rendered == row.states;
    }
    report("canonical encodings replay (32 rows)", replay);

    auto sub = subranges(model, kStartState, NatRange(mpz_class(0), mpz_class(3)));
    report("start splits [0,3] into halves",
           sub.size() == 2 && sub[0].second == NatRange(mpz_class(0), mpz_class(1)) &&
               sub[1].second == NatRange(mpz_class(2), mpz_class(3)));

    bool round = true;
    std::mt19937_64 gen(12345);
    auto corpus_model = build_model(tokenize(fixture::corpus()), 1);
    for (auto mode : {CoderMode::exact, CoderMode::windowed}) {
        CodecConfig cfg;
        cfg.mode = mode;
        cfg.header_bits = 16;
        cfg.model_digest = corpus_model.digest;
        for (int i = 0; i < 16; ++i) {
            std::vector<std::uint8_t> payload(gen() % 600);
            for (auto& b : payload) b = static_cast<std::uint8_t>(gen());
            auto stego = encode(corpus_model, payload, cfg, i);
            round = round && decode_text(corpus_model, stego.rendering, cfg) == payload;
        }
    }
    report("random payload round trips, both modes", round);

    std::cout << (failures == 0 ? "selftest ok\n" : "selftest FAILED\n");
    return failures == 0 ? kExitOk : kExitDecode;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hide binary data in generated natural-language text"};
    app.require_subcommand(1);

    // build-model
    std::string corpus_path, model_path, in_path, out_path, manifest_path;
    int order = 1;
    auto* build = app.add_subcommand("build-model", "Estimate a model from a text corpus");
    build->add_option("corpus", corpus_path, "Plain-text corpus")->required();
    build->add_option("-o,--output", out_path, "Model file to write")->required();
    build->add_option("--order", order, "1 = word states, 2 = word-pair states")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();

    // encode
    CodecFlags enc_flags;
    std::optional<std::uint64_t> seed;
    unsigned wrap = 80;
    auto* enc = app.add_subcommand("encode", "Encode a payload file into text");
    enc->add_option("model", model_path, "Model file")->required();
    enc->add_option("input", in_path, "Payload file (raw bytes)")->required();
    enc->add_option("-o,--output", out_path, "Stegotext file to write")->required();
    add_codec_flags(enc, enc_flags);
    enc->add_option("--seed", seed, "Seed for the sentence-completing padding");
    enc->add_option("--wrap", wrap, "Wrap column for the text, 0 disables")
        ->capture_default_str();
    enc->add_option("--manifest", manifest_path,
                    "Write a sidecar manifest (digest + configuration) here");

    // decode
    CodecFlags dec_flags;
    auto* dec = app.add_subcommand("decode", "Recover the payload from a stegotext");
    dec->add_option("model", model_path, "Model file")->required();
    dec->add_option("input", in_path, "Stegotext file")->required();
    dec->add_option("-o,--output", out_path, "Payload file to write")->required();
    add_codec_flags(dec, dec_flags);
    dec->add_option("--manifest", manifest_path,
                    "Manifest to verify against (default: <input>.manifest.json if present)");

    // bench
    CodecFlags bench_flags;
    std::string sizes = "10240,20480,40960";
    std::uint64_t bench_seed = 42;
    auto* bench = app.add_subcommand("bench", "Measure expansion ratio and throughput");
    bench->add_option("model", model_path, "Model file")->required();
    bench->add_option("--sizes", sizes, "Comma-separated payload sizes in bytes")
        ->capture_default_str();
    add_codec_flags(bench, bench_flags);
    bench->add_option("--seed", bench_seed, "Payload and padding seed")
        ->capture_default_str();

    auto* self = app.add_subcommand("selftest", "Run the built-in verification suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (build->parsed()) return cmd_build_model(corpus_path, out_path, order);
        if (enc->parsed())
            return cmd_encode(enc, model_path, in_path, out_path, enc_flags, seed, wrap,
                              manifest_path);
        if (dec->parsed())
            return cmd_decode(dec, model_path, in_path, out_path, dec_flags, manifest_path);
        if (bench->parsed()) return cmd_bench(model_path, sizes, bench_flags, bench_seed);
        if (self->parsed()) return cmd_selftest();
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ConfigMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const PayloadTooLarge& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const MalformedModelFile& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const DegenerateModel& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const Error& e) {
        std::cerr << "decode error: " << e.what() << "\n";
        return kExitDecode;
    } catch (const json::exception& e) {
        std::cerr << "manifest error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
