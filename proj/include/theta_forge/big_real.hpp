#pragma once

#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace theta_forge {

/// Requested decimal digits plus guard digits; fixes the binary working precision.
struct Precision {
  static constexpr int kDefaultGuard = 15;
  static constexpr int kMinDigits = 10;

  int digits = 50;
  int guard = kDefaultGuard;

  Precision() = default;
  explicit Precision(int digits_, int guard_ = kDefaultGuard);

  /// Binary precision covering (digits + guard) decimal digits, never below 64 bits.
  mpfr_prec_t bits() const;

  Precision with_extra_digits(int extra) const { return Precision(digits + extra, guard); }
  Precision with_guard(int g) const { return Precision(digits, g); }
};

/// Arbitrary-precision real backed by an MPFR value. Binary operations produce a
/// result at the larger of the two operand precisions, rounded to nearest.
class BigReal {
 public:
  BigReal();
  explicit BigReal(mpfr_prec_t bits);
  BigReal(long value, mpfr_prec_t bits);
  ~BigReal();

  BigReal(const BigReal& other);
  BigReal(BigReal&& other) noexcept;
  BigReal& operator=(const BigReal& other);
  BigReal& operator=(BigReal&& other) noexcept;

  static BigReal from_string(std::string_view text, mpfr_prec_t bits);
  static BigReal from_rational(std::int64_t num, std::int64_t den, mpfr_prec_t bits);
  static BigReal from_double(double value, mpfr_prec_t bits);

  mpfr_prec_t precision() const { return mpfr_get_prec(value_); }
  /// Copy rounded to a different precision.
  BigReal rounded_to(mpfr_prec_t bits) const;

  mpfr_srcptr get() const { return value_; }
  mpfr_ptr get() { return value_; }

  int sign() const { return mpfr_sgn(value_); }
  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const { return mpfr_number_p(value_) != 0; }
  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  /// Base-2 exponent e with 0.5 <= |x|/2^e < 1; very negative for zero.
  long exponent2() const;

  /// Decimal rendering with `significant` digits: fixed notation for moderate
  /// magnitudes, scientific otherwise.
  std::string to_decimal(int significant) const;
  /// Always scientific, e.g. "1.23456e-41".
  std::string to_scientific(int significant) const;

  BigReal operator-() const;
  BigReal& operator+=(const BigReal& rhs);
  BigReal& operator-=(const BigReal& rhs);
  BigReal& operator*=(const BigReal& rhs);
  BigReal& operator/=(const BigReal& rhs);
  BigReal& operator*=(long rhs);
  BigReal& operator/=(long rhs);
  BigReal& operator+=(long rhs);
  BigReal& operator-=(long rhs);

  friend BigReal operator+(BigReal lhs, const BigReal& rhs) { return lhs += rhs; }
  friend BigReal operator-(BigReal lhs, const BigReal& rhs) { return lhs -= rhs; }
  friend BigReal operator*(BigReal lhs, const BigReal& rhs) { return lhs *= rhs; }
  friend BigReal operator/(BigReal lhs, const BigReal& rhs) { return lhs /= rhs; }
  friend BigReal operator+(BigReal lhs, long rhs) { return lhs += rhs; }
  friend BigReal operator-(BigReal lhs, long rhs) { return lhs -= rhs; }
  friend BigReal operator*(BigReal lhs, long rhs) { return lhs *= rhs; }
  friend BigReal operator/(BigReal lhs, long rhs) { return lhs /= rhs; }
  friend BigReal operator+(long lhs, BigReal rhs) { return rhs += lhs; }
  friend BigReal operator*(long lhs, BigReal rhs) { return rhs *= lhs; }
  friend BigReal operator-(long lhs, const BigReal& rhs);
  friend BigReal operator/(long lhs, const BigReal& rhs);

  friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
  friend std::partial_ordering operator<=>(const BigReal& a, const BigReal& b);
  friend std::partial_ordering operator<=>(const BigReal& a, long b);
  friend bool operator==(const BigReal& a, long b) { return mpfr_cmp_si(a.value_, b) == 0; }

 private:
  void grow_to(mpfr_prec_t bits);

  mpfr_t value_;
};

BigReal abs(const BigReal& x);
BigReal sqrt(const BigReal& x);
/// Real n-th root; negative radicand with even n is a DomainError.
BigReal root(const BigReal& x, unsigned long n);
BigReal exp(const BigReal& x);
BigReal log(const BigReal& x);
BigReal pow(const BigReal& x, long n);
BigReal pow(const BigReal& x, const BigReal& y);
/// x^(num/den) for den >= 1, defined for negative x when den is odd.
BigReal pow_rational(const BigReal& x, std::int64_t num, std::int64_t den);
BigReal pi(mpfr_prec_t bits);
const BigReal& max_abs(const BigReal& a, const BigReal& b);

/// |a - b| / max(|a|, |b|); zero when both vanish.
BigReal relative_difference(const BigReal& a, const BigReal& b);
/// 10^(-exponent) at the given precision.
BigReal ten_to_minus(int exponent, mpfr_prec_t bits);

}  // namespace theta_forge
