#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace cbp {

/// Small exact rational used to evaluate the closed-form coefficient families.
class Rational {
 public:
  constexpr Rational(std::int64_t num = 0, std::int64_t den = 1) : num_(num), den_(den) { normalize(); }

  constexpr std::int64_t num() const noexcept { return num_; }
  constexpr std::int64_t den() const noexcept { return den_; }
  constexpr double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend constexpr Rational operator+(Rational a, Rational b) { return make(wide(a.num_) * b.den_ + wide(b.num_) * a.den_, wide(a.den_) * b.den_); }
  friend constexpr Rational operator-(Rational a, Rational b) { return make(wide(a.num_) * b.den_ - wide(b.num_) * a.den_, wide(a.den_) * b.den_); }
  friend constexpr Rational operator*(Rational a, Rational b) { return make(wide(a.num_) * b.num_, wide(a.den_) * b.den_); }
  friend constexpr Rational operator/(Rational a, Rational b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return make(wide(a.num_) * b.den_, wide(a.den_) * b.num_);
  }
  friend constexpr bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend constexpr bool operator<(Rational a, Rational b) { return wide(a.num_) * b.den_ < wide(b.num_) * a.den_; }
  friend constexpr bool operator<=(Rational a, Rational b) { return !(b < a); }

 private:
  __extension__ typedef __int128 Wide;
  static constexpr Wide wide(std::int64_t v) { return static_cast<Wide>(v); }

  static constexpr Rational make(Wide n, Wide d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    Wide a = n < 0 ? -n : n;
    Wide b = d;
    while (b != 0) {
      Wide t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    constexpr Wide lim = static_cast<Wide>(INT64_MAX);
    if (n > lim || -n > lim || d > lim) throw std::overflow_error("rational overflow");
    return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
  }

  constexpr void normalize() {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_;
  std::int64_t den_;
};

/// Recovers a small-denominator rational whose double image is exactly x (0.5 -> 1/2, 0.45 -> 9/20).
inline std::optional<Rational> exact_rational(double x, std::int64_t max_den = 1'000'000) {
  if (!std::isfinite(x)) return std::nullopt;
  double r = x;
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int iter = 0; iter < 40; ++iter) {
    double a = std::floor(r);
    if (std::abs(a) > 1e15) break;
    auto ai = static_cast<std::int64_t>(a);
    std::int64_t h2 = ai * h1 + h0;
    std::int64_t k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (static_cast<double>(h1) / static_cast<double>(k1) == x) return Rational(h1, k1);
    double frac = r - a;
    if (frac == 0.0) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

}  // namespace cbp
