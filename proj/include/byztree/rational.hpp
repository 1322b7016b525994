#pragma once

// Exact integer and rational arithmetic. Every operation that could leave the
// int64 range throws std::overflow_error instead of wrapping.

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace byztree {

namespace checked {

inline std::int64_t add(std::int64_t lhs, std::int64_t rhs) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(lhs, rhs, &out)) {
    throw std::overflow_error("integer overflow in addition");
  }
  return out;
}

inline std::int64_t sub(std::int64_t lhs, std::int64_t rhs) {
  std::int64_t out = 0;
  if (__builtin_sub_overflow(lhs, rhs, &out)) {
    throw std::overflow_error("integer overflow in subtraction");
  }
  return out;
}

inline std::int64_t mul(std::int64_t lhs, std::int64_t rhs) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(lhs, rhs, &out)) {
    throw std::overflow_error("integer overflow in multiplication");
  }
  return out;
}

inline std::int64_t pow(std::int64_t base, int exponent) {
  if (exponent < 0) {
    throw std::domain_error("negative exponent");
  }
  std::int64_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    out = mul(out, base);
  }
  return out;
}

inline std::int64_t narrow(__int128 value) {
  if (value > INT64_MAX || value < INT64_MIN) {
    throw std::overflow_error("integer overflow narrowing 128-bit intermediate");
  }
  return static_cast<std::int64_t>(value);
}

}  // namespace checked

/// Normalized fraction num/den with den > 0 and gcd(num, den) = 1.
/// Intermediates are carried in 128 bits and narrowed after reduction.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num) : num_(num) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double toDouble() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  explicit operator double() const { return toDouble(); }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return fromWide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                    static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return fromWide(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                    static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return fromWide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) {
      throw std::domain_error("rational division by zero");
    }
    return fromWide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  Rational operator-() const { return fromWide(-static_cast<__int128>(num_), den_); }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  static __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational fromWide(__int128 num, __int128 den) {
    if (den == 0) {
      throw std::domain_error("rational with zero denominator");
    }
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const __int128 g = gcd128(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    Rational out;
    out.num_ = checked::narrow(num);
    out.den_ = checked::narrow(den);
    return out;
  }

  void assign(std::int64_t num, std::int64_t den) { *this = fromWide(num, den); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline double toDouble(double x) { return x; }
inline double toDouble(const Rational& x) { return x.toDouble(); }

}  // namespace byztree
