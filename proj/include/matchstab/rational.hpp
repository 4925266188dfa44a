#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "matchstab/error.hpp"

namespace matchstab {

/// Exact fraction of 128-bit integers, always stored in lowest terms with a
/// positive denominator. Every operation is checked: if an intermediate
/// product or sum does not fit in 128 bits the operation throws
/// Errc::Overflow instead of silently wrapping. All probabilities, capacities
/// and drift values in this library flow through this type; floating point
/// only appears in simulation statistics.
class Rational {
 public:
  using Int = __int128;

  constexpr Rational() : num_(0), den_(1) {}
  Rational(long long value) : num_(value), den_(1) {}
  Rational(long long num, long long den);
  static Rational from_int128(Int num, Int den);

  Int num() const { return num_; }
  Int den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_positive() const { return num_ > 0; }
  bool is_negative() const { return num_ < 0; }

  Rational operator-() const;
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const;
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator<=(const Rational& o) const { return !(o < *this); }
  bool operator>=(const Rational& o) const { return !(*this < o); }

  double to_double() const;

  /// Formats as "p/q" (the denominator is always printed, e.g. "1/1").
  std::string to_string() const;
  /// Accepts "p" or "p/q" with optional sign.
  static Rational parse(std::string_view text);

  /// Exact decimal expansion when the denominator divides a power of ten,
  /// otherwise falls back to to_string().
  std::string to_decimal_string() const;

 private:
  Int num_;
  Int den_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

namespace detail {

inline Rational::Int checked_add(Rational::Int a, Rational::Int b) {
  Rational::Int out;
  if (__builtin_add_overflow(a, b, &out))
    throw Error(Errc::Overflow, "128-bit addition overflow");
  return out;
}

inline Rational::Int checked_mul(Rational::Int a, Rational::Int b) {
  Rational::Int out;
  if (__builtin_mul_overflow(a, b, &out))
    throw Error(Errc::Overflow, "128-bit multiplication overflow");
  return out;
}

inline unsigned __int128 uabs(Rational::Int v) {
  return v < 0 ? -static_cast<unsigned __int128>(v)
               : static_cast<unsigned __int128>(v);
}

inline Rational::Int gcd128(Rational::Int a, Rational::Int b) {
  unsigned __int128 x = uabs(a), y = uabs(b);
  while (y != 0) {
    unsigned __int128 t = x % y;
    x = y;
    y = t;
  }
  return static_cast<Rational::Int>(x);
}

std::string int128_to_string(Rational::Int value);
Rational::Int int128_from_string(std::string_view digits, bool negative);

}  // namespace detail

inline Rational Rational::from_int128(Int num, Int den) {
  if (den == 0) throw Error(Errc::BadInput, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Rational r;
  if (num == 0) return r;
  Int g = detail::gcd128(num, den);
  r.num_ = num / g;
  r.den_ = den / g;
  return r;
}

inline Rational::Rational(long long num, long long den) {
  *this = from_int128(Int(num), Int(den));
}

inline Rational Rational::operator-() const {
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

inline Rational Rational::operator+(const Rational& o) const {
  Int g = detail::gcd128(den_, o.den_);
  Int lhs = detail::checked_mul(num_, o.den_ / g);
  Int rhs = detail::checked_mul(o.num_, den_ / g);
  Int den = detail::checked_mul(den_, o.den_ / g);
  return from_int128(detail::checked_add(lhs, rhs), den);
}

inline Rational Rational::operator-(const Rational& o) const {
  return *this + (-o);
}

inline Rational Rational::operator*(const Rational& o) const {
  Int g1 = detail::gcd128(num_, o.den_);
  Int g2 = detail::gcd128(o.num_, den_);
  return from_int128(detail::checked_mul(num_ / g1, o.num_ / g2),
                     detail::checked_mul(den_ / g2, o.den_ / g1));
}

inline Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw Error(Errc::BadInput, "division by zero");
  Rational inv;
  inv.num_ = o.den_;
  inv.den_ = o.num_;
  if (inv.den_ < 0) {
    inv.num_ = -inv.num_;
    inv.den_ = -inv.den_;
  }
  return *this * inv;
}

inline bool Rational::operator<(const Rational& o) const {
  return detail::checked_mul(num_, o.den_) < detail::checked_mul(o.num_, den_);
}

inline double Rational::to_double() const {
  return static_cast<double>(static_cast<long double>(num_) /
                             static_cast<long double>(den_));
}

}  // namespace matchstab
