#include "stablereg/bits.hpp"

#include <cassert>

namespace stablereg {

std::size_t popcount_and(std::span<const Word> lhs, std::span<const Word> rhs) {
  assert(lhs.size() == rhs.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < lhs.size(); ++i) total += static_cast<std::size_t>(std::popcount(lhs[i] & rhs[i]));
  return total;
}

std::size_t popcount_and_not(std::span<const Word> lhs, std::span<const Word> rhs) {
  assert(lhs.size() == rhs.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < lhs.size(); ++i) total += static_cast<std::size_t>(std::popcount(lhs[i] & ~rhs[i]));
  return total;
}

void Bits::set_all() {
  for (auto& w : words_) w = ~Word{0};
  if (size_ % 64 != 0 && !words_.empty()) words_.back() &= (Word{1} << (size_ % 64)) - 1;
}

void Bits::clear() {
  for (auto& w : words_) w = 0;
}

std::size_t Bits::count() const {
  std::size_t total = 0;
  for (Word w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

bool Bits::any() const {
  for (Word w : words_)
    if (w != 0) return true;
  return false;
}

Bits& Bits::operator&=(const Bits& other) { return and_words(other.words_); }

Bits& Bits::operator|=(const Bits& other) {
  assert(other.size_ == size_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

Bits& Bits::and_not(const Bits& other) { return and_not_words(other.words_); }

Bits& Bits::and_words(std::span<const Word> other) {
  assert(other.size() == words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other[i];
  return *this;
}

Bits& Bits::and_not_words(std::span<const Word> other) {
  assert(other.size() == words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other[i];
  return *this;
}

std::size_t Bits::next(std::size_t from) const {
  if (from >= size_) return size_;
  std::size_t w = from / 64;
  Word bits = words_[w] & (~Word{0} << (from % 64));
  while (true) {
    if (bits != 0) return w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
    if (++w == words_.size()) return size_;
    bits = words_[w];
  }
}

std::vector<Vertex> Bits::to_vector() const {
  std::vector<Vertex> out;
  out.reserve(count());
  for_each([&](Vertex v) { out.push_back(v); });
  return out;
}

std::size_t Bits::hash() const {
  // FNV-style mix over the words.
  std::size_t h = 1469598103934665603ULL ^ size_;
  for (Word w : words_) {
    h ^= static_cast<std::size_t>(w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace stablereg
