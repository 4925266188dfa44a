#include "matchstab/rational.hpp"

#include <algorithm>
#include <ostream>

namespace matchstab {
namespace detail {

std::string int128_to_string(Rational::Int value) {
  if (value == 0) return "0";
  bool neg = value < 0;
  unsigned __int128 v = uabs(value);
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  if (neg) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

Rational::Int int128_from_string(std::string_view digits, bool negative) {
  if (digits.empty()) throw Error(Errc::ParseError, "empty integer");
  unsigned __int128 v = 0;
  constexpr unsigned __int128 limit =
      static_cast<unsigned __int128>(1) << 126;
  for (char ch : digits) {
    if (ch < '0' || ch > '9')
      throw Error(Errc::ParseError, "bad digit in rational");
    if (v > limit) throw Error(Errc::Overflow, "rational literal too large");
    v = v * 10 + static_cast<unsigned>(ch - '0');
  }
  Rational::Int out = static_cast<Rational::Int>(v);
  if (out < 0) throw Error(Errc::Overflow, "rational literal too large");
  return negative ? -out : out;
}

}  // namespace detail

std::string Rational::to_string() const {
  return detail::int128_to_string(num_) + "/" + detail::int128_to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  if (text.empty()) throw Error(Errc::ParseError, "empty rational");
  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return from_int128(detail::int128_from_string(text, negative), Int(1));
  }
  Int num = detail::int128_from_string(text.substr(0, slash), negative);
  Int den = detail::int128_from_string(text.substr(slash + 1), false);
  return from_int128(num, den);
}

std::string Rational::to_decimal_string() const {
  // Terminating expansion exists iff den = 2^a * 5^b.
  Int d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return to_string();
  int digits = std::max(twos, fives);
  unsigned __int128 scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  unsigned __int128 mag_num = detail::uabs(num_);
  if (scale != 0 && mag_num > (~static_cast<unsigned __int128>(0)) / scale)
    return to_string();
  unsigned __int128 mag = mag_num * scale / static_cast<unsigned __int128>(den_);
  std::string raw = detail::int128_to_string(static_cast<Int>(mag));
  std::string out = num_ < 0 ? "-" : "";
  if (digits == 0) return out + raw;
  if (static_cast<int>(raw.size()) <= digits)
    raw.insert(raw.begin(), digits + 1 - raw.size(), '0');
  raw.insert(raw.end() - digits, '.');
  return out + raw;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.to_string();
}

}  // namespace matchstab
