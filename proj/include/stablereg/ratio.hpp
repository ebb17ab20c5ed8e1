#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace stablereg {

using Int128 = __int128;

// Exact non-negative-denominator rational, used for every margin that enters a strict
// inequality against a vertex count.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den = 1);

  // Accepts "3", "0.25", "1/8", "1.5e-2".
  static Ratio parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  long double value_ld() const { return static_cast<long double>(num_) / static_cast<long double>(den_); }
  std::string str() const;

  friend Ratio operator+(Ratio a, Ratio b);
  friend Ratio operator-(Ratio a, Ratio b);
  friend Ratio operator*(Ratio a, Ratio b);
  friend Ratio operator/(Ratio a, Ratio b);
  friend bool operator==(Ratio a, Ratio b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend std::strong_ordering operator<=>(Ratio a, Ratio b);

  Ratio pow(unsigned exponent) const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// count < margin * size, evaluated exactly.
bool below_fraction(std::uint64_t count, Ratio margin, std::uint64_t size);

// Integer-valued helpers for x^e with rational exponent e = p/q.
// less_than_power: value < base^e.
bool less_than_power(std::uint64_t value, std::uint64_t base, Ratio exponent);
// value <= base^e.
bool at_most_power(std::uint64_t value, std::uint64_t base, Ratio exponent);
// floor(base^e) and ceil(base^e).
std::uint64_t floor_power(std::uint64_t base, Ratio exponent);
std::uint64_t ceil_power(std::uint64_t base, Ratio exponent);
// floor(base^e) for a real exponent; exact whenever the result is an integer power.
std::uint64_t floor_power_real(std::uint64_t base, long double exponent);

// Checked integer power; nullopt on overflow of 127 bits.
std::optional<Int128> checked_pow(std::uint64_t base, std::uint64_t exponent);

}  // namespace stablereg
