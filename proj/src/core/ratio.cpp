#include "stablereg/ratio.hpp"

#include <cctype>
#include <cmath>
#include <numeric>

#include "stablereg/errors.hpp"

namespace stablereg {

namespace {

std::int64_t narrow(Int128 value) {
  if (value > INT64_MAX || value < INT64_MIN) throw ValidationError("rational overflow");
  return static_cast<std::int64_t>(value);
}

struct Reduced {
  std::int64_t num;
  std::int64_t den;
};

Reduced reduce(Int128 num, Int128 den) {
  if (den == 0) throw ValidationError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Int128 a = num < 0 ? -num : num;
  Int128 b = den;
  while (b != 0) {
    Int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return {narrow(num), narrow(den)};
}

Ratio make(Int128 num, Int128 den) {
  Reduced r = reduce(num, den);
  return Ratio(r.num, r.den);
}

// Sign of x^q - b^p, exact when both fit in 127 bits.
int compare_powers(std::uint64_t x, std::uint64_t q, std::uint64_t b, std::uint64_t p) {
  auto lhs = checked_pow(x, q);
  auto rhs = checked_pow(b, p);
  if (lhs && rhs) return *lhs < *rhs ? -1 : (*lhs > *rhs ? 1 : 0);
  if (x == 0) return (b == 0 && p > 0) ? 0 : -1;
  if (b == 0) return p == 0 ? (x > 1 ? 1 : (x == 1 ? 0 : -1)) : 1;
  long double l = static_cast<long double>(q) * std::log(static_cast<long double>(x));
  long double r = static_cast<long double>(p) * std::log(static_cast<long double>(b));
  return l < r ? -1 : (l > r ? 1 : 0);
}

}  // namespace

Ratio::Ratio(std::int64_t num, std::int64_t den) {
  Reduced r = reduce(num, den);
  num_ = r.num;
  den_ = r.den;
}

Ratio Ratio::parse(std::string_view text) {
  auto fail = [&] { return ValidationError("not a number: '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Ratio n = parse(text.substr(0, slash));
    Ratio d = parse(text.substr(slash + 1));
    if (d.num() == 0) throw fail();
    return n / d;
  }
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') negative = text[i++] == '-';
  Int128 num = 0;
  Int128 den = 1;
  bool digits = false;
  bool fraction = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = true;
      num = num * 10 + (c - '0');
      if (fraction) den *= 10;
      if (num > INT64_MAX || den > INT64_MAX) throw fail();
    } else if (c == '.' && !fraction) {
      fraction = true;
    } else {
      break;
    }
  }
  if (!digits) throw fail();
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') throw fail();
    ++i;
    bool neg_exp = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg_exp = text[i++] == '-';
    if (i == text.size()) throw fail();
    int exponent = 0;
    for (; i < text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i])) || exponent > 18) throw fail();
      exponent = exponent * 10 + (text[i] - '0');
    }
    for (int k = 0; k < exponent; ++k) {
      (neg_exp ? den : num) *= 10;
      if (num > INT64_MAX || den > INT64_MAX) throw fail();
    }
  }
  return make(negative ? -num : num, den);
}

std::string Ratio::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Ratio operator+(Ratio a, Ratio b) {
  return make(Int128(a.num_) * b.den_ + Int128(b.num_) * a.den_, Int128(a.den_) * b.den_);
}
Ratio operator-(Ratio a, Ratio b) {
  return make(Int128(a.num_) * b.den_ - Int128(b.num_) * a.den_, Int128(a.den_) * b.den_);
}
Ratio operator*(Ratio a, Ratio b) { return make(Int128(a.num_) * b.num_, Int128(a.den_) * b.den_); }
Ratio operator/(Ratio a, Ratio b) { return make(Int128(a.num_) * b.den_, Int128(a.den_) * b.num_); }

std::strong_ordering operator<=>(Ratio a, Ratio b) {
  Int128 l = Int128(a.num_) * b.den_;
  Int128 r = Int128(b.num_) * a.den_;
  return l < r ? std::strong_ordering::less : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
}

Ratio Ratio::pow(unsigned exponent) const {
  Ratio out(1);
  for (unsigned i = 0; i < exponent; ++i) out = out * *this;
  return out;
}

bool below_fraction(std::uint64_t count, Ratio margin, std::uint64_t size) {
  return Int128(count) * margin.den() < Int128(margin.num()) * Int128(size);
}

std::optional<Int128> checked_pow(std::uint64_t base, std::uint64_t exponent) {
  constexpr Int128 limit = (Int128(1) << 126);
  if (base <= 1) return Int128(exponent == 0 ? 1 : base);
  Int128 out = 1;
  for (std::uint64_t i = 0; i < exponent; ++i) {
    if (base != 0 && out > limit / Int128(base)) return std::nullopt;
    out *= base;
  }
  return out;
}

bool less_than_power(std::uint64_t value, std::uint64_t base, Ratio exponent) {
  if (exponent.num() < 0) throw ValidationError("negative exponent");
  return compare_powers(value, static_cast<std::uint64_t>(exponent.den()), base,
                        static_cast<std::uint64_t>(exponent.num())) < 0;
}

bool at_most_power(std::uint64_t value, std::uint64_t base, Ratio exponent) {
  if (exponent.num() < 0) throw ValidationError("negative exponent");
  return compare_powers(value, static_cast<std::uint64_t>(exponent.den()), base,
                        static_cast<std::uint64_t>(exponent.num())) <= 0;
}

std::uint64_t floor_power(std::uint64_t base, Ratio exponent) {
  if (exponent.num() < 0) throw ValidationError("negative exponent");
  auto q = static_cast<std::uint64_t>(exponent.den());
  auto p = static_cast<std::uint64_t>(exponent.num());
  long double estimate = std::pow(static_cast<long double>(base), exponent.value_ld());
  if (estimate > 1.8e19L) throw ValidationError("power out of range");
  auto x = static_cast<std::uint64_t>(estimate);
  while (compare_powers(x + 1, q, base, p) <= 0) ++x;
  while (x > 0 && compare_powers(x, q, base, p) > 0) --x;
  return x;
}

std::uint64_t ceil_power(std::uint64_t base, Ratio exponent) {
  std::uint64_t x = floor_power(base, exponent);
  if (compare_powers(x, static_cast<std::uint64_t>(exponent.den()), base, static_cast<std::uint64_t>(exponent.num())) == 0)
    return x;
  return x + 1;
}

std::uint64_t floor_power_real(std::uint64_t base, long double exponent) {
  long double value = std::pow(static_cast<long double>(base), exponent);
  long double nearest = std::round(value);
  if (std::fabs(value - nearest) <= 1e-9L * std::max<long double>(1, value)) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::floor(value));
}

}  // namespace stablereg
