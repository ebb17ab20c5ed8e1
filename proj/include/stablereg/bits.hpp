#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace stablereg {

using Vertex = std::uint32_t;
using Word = std::uint64_t;

constexpr std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

std::size_t popcount_and(std::span<const Word> lhs, std::span<const Word> rhs);
std::size_t popcount_and_not(std::span<const Word> lhs, std::span<const Word> rhs);

// Fixed-length bit vector. Used for adjacency rows and vertex subsets.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t size) : size_(size), words_(words_for(size), 0) {}

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i) { words_[i / 64] |= Word{1} << (i % 64); }
  void reset(std::size_t i) { words_[i / 64] &= ~(Word{1} << (i % 64)); }
  void assign(std::size_t i, bool value) { value ? set(i) : reset(i); }
  void set_all();
  void clear();

  std::size_t count() const;
  bool any() const;
  bool none() const { return !any(); }

  std::span<const Word> words() const { return words_; }
  std::span<Word> words() { return words_; }

  Bits& operator&=(const Bits& other);
  Bits& operator|=(const Bits& other);
  Bits& and_not(const Bits& other);
  Bits& and_words(std::span<const Word> other);
  Bits& and_not_words(std::span<const Word> other);

  // Index of the lowest set bit at or after `from`, or size() if none.
  std::size_t next(std::size_t from) const;
  std::size_t first() const { return next(0); }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      Word bits = words_[w];
      while (bits != 0) {
        fn(static_cast<Vertex>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
        bits &= bits - 1;
      }
    }
  }

  std::vector<Vertex> to_vector() const;
  std::size_t hash() const;

  friend bool operator==(const Bits&, const Bits&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<Word> words_;
};

struct BitsHash {
  std::size_t operator()(const Bits& bits) const { return bits.hash(); }
};

}  // namespace stablereg
