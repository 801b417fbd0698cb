#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctri {

// Append-only bit string. Fields are written most-significant bit first, so
// the concatenation of fields reads as a big-endian bit stream.
class BitString {
 public:
  BitString() = default;

  std::size_t size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }
  void reserve(std::size_t nbits) { words_.reserve((nbits + 63) / 64); }

  bool bit(std::size_t i) const { return (words_[i / 64] >> (63 - i % 64)) & 1U; }

  // Appends the low `width` bits of value (width <= 64).
  void push(std::uint64_t value, unsigned width) {
    if (width == 0) return;
    if (width < 64) value &= (std::uint64_t{1} << width) - 1;
    const std::size_t off = nbits_ % 64;
    if (off == 0) words_.push_back(0);
    const unsigned room = static_cast<unsigned>(64 - off);
    if (width <= room) {
      words_.back() |= value << (room - width);
    } else {
      const unsigned spill = width - room;
      words_.back() |= value >> spill;
      words_.push_back(value << (64 - spill));
    }
    nbits_ += width;
  }

  // Reads `width` bits starting at pos as an unsigned value (width <= 64).
  std::uint64_t extract(std::size_t pos, unsigned width) const {
    if (width == 0) return 0;
    const std::size_t w = pos / 64;
    const unsigned off = static_cast<unsigned>(pos % 64);
    const std::uint64_t hi = words_[w] << off;
    if (off + width <= 64) return hi >> (64 - width);
    return (hi >> (64 - width)) | (words_[w + 1] >> (128 - off - width));
  }

  void push_bit(bool b) { push(b ? 1U : 0U, 1); }

  void append(const BitString& o) {
    for (std::size_t i = 0; i < o.nbits_; i += 64) {
      const unsigned w = static_cast<unsigned>(std::min<std::size_t>(64, o.nbits_ - i));
      push(o.words_[i / 64] >> (64 - w), w);
    }
  }

  // "0101..." rendering, for diagnostics and golden tests.
  std::string to_string() const {
    std::string s;
    s.reserve(nbits_);
    for (std::size_t i = 0; i < nbits_; ++i) s.push_back(bit(i) ? '1' : '0');
    return s;
  }

  static BitString from_string(const std::string& s) {
    BitString b;
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("bit string must be 0/1 characters");
      b.push_bit(c == '1');
    }
    return b;
  }

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

// Sequential reader over a BitString; throws std::out_of_range past the end.
class BitReader {
 public:
  explicit BitReader(const BitString& bits, std::size_t pos = 0) : bits_(&bits), pos_(pos) {}

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bits_->size() - pos_; }

  std::uint64_t read(unsigned width) {
    if (width > remaining()) throw std::out_of_range("bit string truncated");
    const std::uint64_t v = bits_->extract(pos_, width);
    pos_ += width;
    return v;
  }

 private:
  const BitString* bits_;
  std::size_t pos_;
};

}  // namespace ctri
