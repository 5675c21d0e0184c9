#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bats {

/// Exact rational arithmetic over int64 numerator/denominator.
///
/// Used for money (currency minor units, e.g. cents) and for exact report
/// means. All intermediate products run through __int128 and reduce before
/// narrowing; anything that would not fit back into int64 throws
/// std::overflow_error rather than silently drifting.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t numerator, std::int64_t denominator) {
    if (denominator == 0) throw std::invalid_argument("Rational: zero denominator");
    assign(numerator, denominator);
  }
  // NOLINTNEXTLINE(google-explicit-constructor): integers promote losslessly
  constexpr Rational(std::int64_t whole) : num_(whole), den_(1) {}

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  bool is_zero() const { return num_ == 0; }

  Rational operator+(const Rational& o) const {
    return from128(i128(num_) * o.den_ + i128(o.num_) * den_, i128(den_) * o.den_);
  }
  Rational operator-(const Rational& o) const {
    return from128(i128(num_) * o.den_ - i128(o.num_) * den_, i128(den_) * o.den_);
  }
  Rational operator*(const Rational& o) const {
    return from128(i128(num_) * o.num_, i128(den_) * o.den_);
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
    return from128(i128(num_) * o.den_, i128(den_) * o.num_);
  }
  Rational operator-() const { return from128(-i128(num_), den_); }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const { return i128(num_) * o.den_ < i128(o.num_) * den_; }
  bool operator<=(const Rational& o) const { return i128(num_) * o.den_ <= i128(o.num_) * den_; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

  /// Canonical "num/den" form ("3/10", "12", "-1/4").
  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Fixed-point decimal with explicit rounding (half away from zero).
  /// This is the one place rounding is allowed; arithmetic stays exact.
  std::string to_decimal(int places) const {
    i128 scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    i128 scaled = i128(num_) * scale;
    i128 q = scaled / den_;
    i128 r = scaled % den_;
    if (r < 0) r = -r;
    if (2 * r >= i128(den_)) q += (num_ < 0 ? -1 : 1);
    bool neg = q < 0;
    if (neg) q = -q;
    std::string digits = u128_to_string(static_cast<unsigned __int128>(q));
    while (static_cast<int>(digits.size()) <= places) digits.insert(digits.begin(), '0');
    std::string out = neg ? "-" : "";
    out += digits.substr(0, digits.size() - places);
    if (places > 0) out += "." + digits.substr(digits.size() - places);
    return out;
  }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Parses "12", "-3/10", or decimal "0.001" (decimals convert exactly).
  static std::optional<Rational> parse(std::string_view s);

 private:
  using i128 = __int128;

  void assign(i128 n, i128 d) {
    if (d < 0) { n = -n; d = -d; }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    constexpr i128 lo = INT64_MIN, hi = INT64_MAX;
    if (n < lo || n > hi || d > hi) throw std::overflow_error("Rational: overflow");
    num_ = static_cast<std::int64_t>(n);
    den_ = static_cast<std::int64_t>(d);
  }

  static Rational from128(i128 n, i128 d) {
    Rational r;
    r.assign(n, d);
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) { i128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }

  static std::string u128_to_string(unsigned __int128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) { s.insert(s.begin(), static_cast<char>('0' + int(v % 10))); v /= 10; }
    return s;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline std::optional<Rational> Rational::parse(std::string_view s) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    return v;
  };
  s = trim(s);
  if (s.empty()) return std::nullopt;
  auto parse_int = [](std::string_view v, std::int64_t& out) -> bool {
    if (v.empty()) return false;
    bool neg = false;
    std::size_t i = 0;
    if (v[0] == '-' || v[0] == '+') { neg = v[0] == '-'; i = 1; }
    if (i >= v.size()) return false;
    i128 acc = 0;
    for (; i < v.size(); ++i) {
      if (v[i] < '0' || v[i] > '9') return false;
      acc = acc * 10 + (v[i] - '0');
      if (acc > i128(INT64_MAX)) return false;
    }
    out = neg ? -static_cast<std::int64_t>(acc) : static_cast<std::int64_t>(acc);
    return true;
  };
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::int64_t n = 0, d = 0;
    if (!parse_int(trim(s.substr(0, slash)), n) || !parse_int(trim(s.substr(slash + 1)), d) || d == 0)
      return std::nullopt;
    return Rational(n, d);
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view whole = s.substr(0, dot), frac = s.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    std::int64_t w = 0;
    if (whole.empty() || whole == "-" || whole == "+") w = 0;
    else if (!parse_int(whole, w)) return std::nullopt;
    if (frac.empty() || frac.size() > 18) return std::nullopt;
    std::int64_t f = 0, scale = 1;
    for (char c : frac) {
      if (c < '0' || c > '9') return std::nullopt;
      f = f * 10 + (c - '0');
      scale *= 10;
    }
    Rational r = Rational(w < 0 ? -w : w, 1) + Rational(f, scale);
    if (neg || w < 0) r = -r;
    return r;
  }
  std::int64_t n = 0;
  if (!parse_int(s, n)) return std::nullopt;
  return Rational(n, 1);
}

/// Money is an exact rational count of currency minor units (cents for USD).
/// $0.001 is Money(1, 10) — one tenth of a cent.
using Money = Rational;

}  // namespace bats
