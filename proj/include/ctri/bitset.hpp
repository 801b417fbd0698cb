#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ctri {

// Fixed-size bitset sized at runtime. Used for adjacency rows and vertex
// subsets; all binary operations require equal sizes.
class DynBitset {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  DynBitset() = default;
  explicit DynBitset(std::size_t nbits) : nbits_(nbits), words_(word_count(nbits), 0) {}

  static constexpr std::size_t word_count(std::size_t nbits) {
    return (nbits + kWordBits - 1) / kWordBits;
  }

  std::size_t size() const { return nbits_; }
  std::span<const Word> words() const { return words_; }
  std::span<Word> words() { return words_; }

  void set(std::size_t i) { words_[i / kWordBits] |= Word{1} << (i % kWordBits); }
  void reset(std::size_t i) { words_[i / kWordBits] &= ~(Word{1} << (i % kWordBits)); }
  bool test(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
  void clear() { std::fill(words_.begin(), words_.end(), 0); }

  std::size_t count() const {
    std::size_t c = 0;
    for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool none() const {
    for (Word w : words_)
      if (w) return false;
    return true;
  }

  bool intersects(const DynBitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }
  std::size_t intersection_count(const DynBitset& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
    return c;
  }

  DynBitset& operator&=(const DynBitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  DynBitset& operator|=(const DynBitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  friend DynBitset operator&(DynBitset a, const DynBitset& b) { return a &= b; }
  friend bool operator==(const DynBitset&, const DynBitset&) = default;

  template <class F>
  void for_each(F&& f) const {
    for_each_in(std::span<const Word>(words_), f);
  }

  template <class F>
  static void for_each_in(std::span<const Word> words, F&& f) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      Word w = words[i];
      while (w) {
        f(i * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

 private:
  std::size_t nbits_ = 0;
  std::vector<Word> words_;
};

}  // namespace ctri
