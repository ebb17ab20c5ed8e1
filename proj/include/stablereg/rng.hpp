#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "stablereg/bits.hpp"

namespace stablereg {

// Seeded generator with portable draws: the standard distributions are implementation
// defined, so bounded integers and reals are derived from raw 64-bit outputs here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  // Independent stream derived from (seed, label, index).
  static Rng stream(std::uint64_t seed, std::string_view label, std::uint64_t index = 0);

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound);
  // Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return unit() < p; }

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }
  // k distinct values of [0, n) in increasing order (Floyd's algorithm).
  std::vector<std::uint64_t> sample_distinct(std::uint64_t n, std::uint64_t k);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace stablereg
