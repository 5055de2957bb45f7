#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

namespace stegomark {

// Bit-level cursors over byte buffers. The stream is MSB-first: bit 0 of
// the stream is the most significant bit of byte 0, so reading the whole
// stream left to right spells the payload as one big-endian number.

class BitReader {
  public:
    BitReader() = default;

    BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_count)
        : bytes_(bytes), nbits_(bit_count) {
        assert(bit_count <= bytes.size() * 8);
    }

    // Reads the top `count` bits of an integer value, e.g. for headers
    // that are not backed by a byte buffer.
    BitReader(std::uint64_t value, unsigned count) : nbits_(count) {
        assert(count <= 64);
        // left-align so bit 0 of the stream is bit count-1 of the value
        std::uint64_t shifted =
            count == 0 ? 0 : (count == 64 ? value : value << (64 - count));
        for (unsigned i = 0; i < 8; ++i)
            inline_[i] = static_cast<std::uint8_t>(shifted >> (56 - 8 * i));
        bytes_ = std::span<const std::uint8_t>(inline_, 8);
    }

    std::size_t size_bits() const { return nbits_; }
    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return nbits_ - pos_; }

    unsigned read_bit() {
        assert(pos_ < nbits_);
        unsigned bit = (bytes_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
        ++pos_;
        return bit;
    }

    std::uint64_t read_bits(unsigned count) {
        assert(count <= 64 && count <= remaining());
        std::uint64_t v = 0;
        for (unsigned i = 0; i < count; ++i) v = (v << 1) | read_bit();
        return v;
    }

  private:
    std::span<const std::uint8_t> bytes_;
    std::size_t nbits_ = 0;
    std::size_t pos_ = 0;
    std::uint8_t inline_[8] = {};
};

class BitWriter {
  public:
    void write_bit(unsigned bit) {
        if ((nbits_ & 7) == 0) bytes_.push_back(0);
        if (bit) bytes_.back() |= static_cast<std::uint8_t>(1u << (7 - (nbits_ & 7)));
        ++nbits_;
    }

    void write_bits(std::uint64_t value, unsigned count) {
        assert(count <= 64);
        for (unsigned i = count; i-- > 0;) write_bit((value >> i) & 1u);
    }

    std::size_t size_bits() const { return nbits_; }

    // Unused low bits of the final byte are zero by construction.
    std::vector<std::uint8_t> take() { return std::move(bytes_); }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  private:
    std::vector<std::uint8_t> bytes_;
    std::size_t nbits_ = 0;
};

// Reverses the low `width` bits of `value` (bit 0 swaps with bit width-1).
inline std::uint64_t reverse_bits(std::uint64_t value, unsigned width) {
    assert(width >= 1 && width <= 64);
    std::uint64_t out = 0;
    for (unsigned i = 0; i < width; ++i)
        out |= ((value >> i) & 1u) << (width - 1 - i);
    return out;
}

}  // namespace stegomark
