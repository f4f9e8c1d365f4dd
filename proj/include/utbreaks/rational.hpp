/**
 * @file utbreaks/rational.hpp
 * @brief Exact rational numbers on int64 with __int128 intermediates.
 * @copyright Apache License 2.0
 */
#ifndef UTBREAKS_RATIONAL_HPP
#define UTBREAKS_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <string>

#include "utbreaks/errors.hpp"

namespace utbreaks {

// Break values live in (1/q)Z with q = p^N; comparisons must be exact, so
// no floating point appears anywhere in this header.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(int64_t n, int64_t d) : num_(n), den_(d) { normalize(); }

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }

  static Rational from_int128(__int128 n, __int128 d) {
    if (d == 0) throw overflow_error("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    check128(n);
    check128(d);
    Rational r;
    r.num_ = static_cast<int64_t>(n);
    r.den_ = static_cast<int64_t>(d);
    return r;
  }

  Rational operator+(const Rational& o) const {
    return from_int128(i128(num_) * o.den_ + i128(o.num_) * den_, i128(den_) * o.den_);
  }
  Rational operator-(const Rational& o) const {
    return from_int128(i128(num_) * o.den_ - i128(o.num_) * den_, i128(den_) * o.den_);
  }
  Rational operator*(const Rational& o) const {
    return from_int128(i128(num_) * o.num_, i128(den_) * o.den_);
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw overflow_error("rational division by zero");
    return from_int128(i128(num_) * o.den_, i128(den_) * o.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const { return i128(num_) * o.den_ < i128(o.num_) * den_; }
  bool operator<=(const Rational& o) const { return i128(num_) * o.den_ <= i128(o.num_) * den_; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

  bool is_integer() const { return den_ == 1; }

  // Largest integer <= value.
  int64_t floor() const {
    if (num_ >= 0) return num_ / den_;
    return -((-num_ + den_ - 1) / den_);
  }

  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

 private:
  static __int128 i128(int64_t v) { return static_cast<__int128>(v); }
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }
  static void check128(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw overflow_error("rational overflow");
  }
  void normalize() {
    if (den_ == 0) throw overflow_error("rational with zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }

  int64_t num_;
  int64_t den_;
};

inline Rational rational_max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational rational_min(const Rational& a, const Rational& b) { return a < b ? a : b; }

}  // namespace utbreaks

#endif  // UTBREAKS_RATIONAL_HPP
