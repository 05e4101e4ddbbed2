#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "theta_forge/big_real.hpp"

namespace theta_forge {

/// Exact element a + b*sqrt(2) of Z[sqrt2].
struct ZSqrt2 {
  std::int64_t a = 0;
  std::int64_t b = 0;

  bool is_zero() const { return a == 0 && b == 0; }
  /// Field norm a^2 - 2b^2; multiplicative, zero only at zero.
  std::int64_t norm() const;
  ZSqrt2 conjugate() const { return {a, -b}; }
  /// Max of |a| and |b|.
  std::int64_t height() const;

  BigReal to_big(mpfr_prec_t bits) const;
  double to_double() const;

  /// "(a,b)"
  std::string to_string() const;
  static ZSqrt2 parse(std::string_view text);

  friend ZSqrt2 operator+(const ZSqrt2& x, const ZSqrt2& y) { return {x.a + y.a, x.b + y.b}; }
  friend ZSqrt2 operator-(const ZSqrt2& x, const ZSqrt2& y) { return {x.a - y.a, x.b - y.b}; }
  friend ZSqrt2 operator-(const ZSqrt2& x) { return {-x.a, -x.b}; }
  friend ZSqrt2 operator*(const ZSqrt2& x, const ZSqrt2& y) {
    return {x.a * y.a + 2 * x.b * y.b, x.a * y.b + x.b * y.a};
  }
  friend bool operator==(const ZSqrt2&, const ZSqrt2&) = default;
};

/// Quotient rounded to the nearest lattice point; the remainder has smaller |norm|.
ZSqrt2 divide_nearest(const ZSqrt2& x, const ZSqrt2& y);
/// Exact division; throws InconsistencyError when y does not divide x.
ZSqrt2 divide_exact(const ZSqrt2& x, const ZSqrt2& y);
ZSqrt2 gcd(ZSqrt2 x, ZSqrt2 y);

/// Fundamental unit 1 + sqrt2 and its integer powers.
ZSqrt2 unit_power(int k);

}  // namespace theta_forge
