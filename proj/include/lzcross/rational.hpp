#pragma once

#include <cctype>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lzcross {

/// Exact rational with 64-bit numerator and denominator, always in lowest
/// terms with a positive denominator. Intermediate products use 128-bit
/// integers and throw on overflow of the reduced result.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT
  Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }

  /// Smallest integer not below the value.
  std::int64_t ceil() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
  }
  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

  std::string to_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

  /// Parses "a", "a/b", or a decimal literal such as "1.5" (converted exactly).
  static Rational parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    text = trim(text);
    if (text.empty()) throw std::invalid_argument("Rational: empty string");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      return Rational(parse_int(trim(text.substr(0, slash))), parse_int(trim(text.substr(slash + 1))));
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
      if (text.find_first_of("eE") != std::string_view::npos)
        return approximate(std::stod(std::string(text)));
      std::string digits(text.substr(0, dot));
      std::string frac(text.substr(dot + 1));
      if (frac.size() > 17) throw std::invalid_argument("Rational: too many decimals");
      std::int64_t den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      const bool negative = !digits.empty() && digits.front() == '-';
      std::int64_t whole = (digits.empty() || digits == "-" || digits == "+") ? 0 : parse_int(digits);
      std::int64_t part = frac.empty() ? 0 : parse_int(frac);
      return Rational(whole) + Rational(negative ? -part : part, den);
    }
    return Rational(parse_int(text));
  }

  /// Best rational approximation with denominator at most `max_den`
  /// (continued fractions); throws if it misses `value` by more than `tol`.
  static Rational approximate(double value, std::int64_t max_den = 1'000'000, double tol = 1e-12) {
    if (!std::isfinite(value)) throw std::invalid_argument("Rational: non-finite value");
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double x = value;
    for (int iter = 0; iter < 64; ++iter) {
      const double a = std::floor(x);
      if (std::abs(a) > 9e15) break;
      const auto ai = static_cast<std::int64_t>(a);
      const std::int64_t q2 = q0 + ai * q1;
      if (q2 > max_den) break;
      const std::int64_t p2 = p0 + ai * p1;
      p0 = p1; q0 = q1; p1 = p2; q1 = q2;
      const double frac = x - a;
      if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - value) <= 1e-15 * std::max(1.0, std::abs(value)) || frac < 1e-15) break;
      x = 1.0 / frac;
    }
    if (q1 == 0) throw std::invalid_argument("Rational: cannot approximate value");
    Rational r(p1, q1);
    if (std::abs(r.to_double() - value) > tol * std::max(1.0, std::abs(value)))
      throw std::invalid_argument("Rational: " + std::to_string(value) + " has no small-denominator representation");
    return r;
  }

 private:
  static std::int64_t parse_int(std::string_view s) {
    std::size_t used = 0;
    const std::string str(s);
    const long long v = std::stoll(str, &used);
    if (used != str.size()) throw std::invalid_argument("Rational: bad integer '" + str + "'");
    return v;
  }

  static Rational from_wide(__int128 num, __int128 den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    __int128 a = num < 0 ? -num : num, b = den;
    while (b != 0) { const __int128 t = a % b; a = b; b = t; }
    if (a > 1) { num /= a; den /= a; }
    constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
    if (num > lim || -num > lim || den > lim) throw std::overflow_error("Rational: overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }

  void assign(std::int64_t num, std::int64_t den) { *this = from_wide(num, den); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace lzcross
