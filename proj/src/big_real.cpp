#include "theta_forge/big_real.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "theta_forge/errors.hpp"

namespace theta_forge {

namespace {

constexpr mpfr_prec_t kMinBits = 64;
constexpr double kLog2Of10 = 3.32192809488736234787;

std::string mpfr_digits(mpfr_srcptr x, int significant, mpfr_exp_t& exp10) {
  char* raw = mpfr_get_str(nullptr, &exp10, 10, static_cast<size_t>(significant), x, MPFR_RNDN);
  std::string digits(raw);
  mpfr_free_str(raw);
  return digits;
}

}  // namespace

Precision::Precision(int digits_, int guard_) : digits(digits_), guard(guard_) {
  if (digits < kMinDigits) {
    throw UsageError("precision must request at least " + std::to_string(kMinDigits) + " digits");
  }
  if (guard < 0) throw UsageError("guard digits must be nonnegative");
}

mpfr_prec_t Precision::bits() const {
  const auto wanted = static_cast<mpfr_prec_t>(std::ceil((digits + guard) * kLog2Of10)) + 8;
  return std::max(wanted, kMinBits);
}

BigReal::BigReal() : BigReal(kMinBits) {}

BigReal::BigReal(mpfr_prec_t bits) {
  mpfr_init2(value_, std::max(bits, kMinBits));
  mpfr_set_zero(value_, 1);
}

BigReal::BigReal(long value, mpfr_prec_t bits) : BigReal(bits) {
  mpfr_set_si(value_, value, MPFR_RNDN);
}

BigReal::~BigReal() { mpfr_clear(value_); }

BigReal::BigReal(const BigReal& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigReal::BigReal(BigReal&& other) noexcept {
  // mpfr_swap needs an initialised target; keep the moved-from value valid.
  mpfr_init2(value_, kMinBits);
  mpfr_swap(value_, other.value_);
}

BigReal& BigReal::operator=(const BigReal& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept {
  if (this != &other) mpfr_swap(value_, other.value_);
  return *this;
}

BigReal BigReal::from_string(std::string_view text, mpfr_prec_t bits) {
  BigReal out(bits);
  const std::string owned(text);
  char* end = nullptr;
  mpfr_strtofr(out.value_, owned.c_str(), &end, 10, MPFR_RNDN);
  if (owned.empty() || end == owned.c_str() || *end != '\0') {
    throw UsageError("not a decimal number: '" + owned + "'");
  }
  return out;
}

BigReal BigReal::from_rational(std::int64_t num, std::int64_t den, mpfr_prec_t bits) {
  if (den == 0) throw DomainError("rational with zero denominator");
  BigReal out(static_cast<long>(num), bits);
  mpfr_div_si(out.value_, out.value_, static_cast<long>(den), MPFR_RNDN);
  return out;
}

BigReal BigReal::from_double(double value, mpfr_prec_t bits) {
  BigReal out(bits);
  mpfr_set_d(out.value_, value, MPFR_RNDN);
  return out;
}

BigReal BigReal::rounded_to(mpfr_prec_t bits) const {
  BigReal out(bits);
  mpfr_set(out.value_, value_, MPFR_RNDN);
  return out;
}

long BigReal::exponent2() const {
  if (is_zero()) return -(1L << 40);
  return static_cast<long>(mpfr_get_exp(value_));
}

std::string BigReal::to_scientific(int significant) const {
  if (mpfr_nan_p(value_)) return "nan";
  if (mpfr_inf_p(value_)) return sign() < 0 ? "-inf" : "inf";
  significant = std::max(significant, 2);
  if (is_zero()) return "0." + std::string(static_cast<size_t>(significant - 1), '0') + "e+00";
  mpfr_exp_t exp10 = 0;
  std::string digits = mpfr_digits(value_, significant, exp10);
  std::string sign_text;
  if (digits.front() == '-') {
    sign_text = "-";
    digits.erase(0, 1);
  }
  const long e = static_cast<long>(exp10) - 1;
  std::string exp_text = std::to_string(std::labs(e));
  if (exp_text.size() < 2) exp_text.insert(0, "0");
  return sign_text + digits.substr(0, 1) + "." + digits.substr(1) + (e < 0 ? "e-" : "e+") + exp_text;
}

std::string BigReal::to_decimal(int significant) const {
  if (!is_finite()) return to_scientific(significant);
  significant = std::max(significant, 1);
  if (is_zero()) return "0." + std::string(static_cast<size_t>(significant), '0');
  mpfr_exp_t exp10 = 0;
  std::string digits = mpfr_digits(value_, significant, exp10);
  std::string sign_text;
  if (digits.front() == '-') {
    sign_text = "-";
    digits.erase(0, 1);
  }
  const long e = static_cast<long>(exp10);
  if (e < -5 || e > 25) return to_scientific(significant);
  if (e <= 0) return sign_text + "0." + std::string(static_cast<size_t>(-e), '0') + digits;
  const auto point = static_cast<size_t>(e);
  if (point >= digits.size()) return sign_text + digits + std::string(point - digits.size(), '0');
  return sign_text + digits.substr(0, point) + "." + digits.substr(point);
}

void BigReal::grow_to(mpfr_prec_t bits) {
  if (bits > precision()) mpfr_prec_round(value_, bits, MPFR_RNDN);
}

BigReal BigReal::operator-() const {
  BigReal out(*this);
  mpfr_neg(out.value_, out.value_, MPFR_RNDN);
  return out;
}

BigReal& BigReal::operator+=(const BigReal& rhs) {
  grow_to(rhs.precision());
  mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator-=(const BigReal& rhs) {
  grow_to(rhs.precision());
  mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator*=(const BigReal& rhs) {
  grow_to(rhs.precision());
  mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator/=(const BigReal& rhs) {
  if (rhs.is_zero()) throw DomainError("division by zero");
  grow_to(rhs.precision());
  mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator*=(long rhs) {
  mpfr_mul_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator/=(long rhs) {
  if (rhs == 0) throw DomainError("division by zero");
  mpfr_div_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator+=(long rhs) {
  mpfr_add_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator-=(long rhs) {
  mpfr_sub_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

BigReal operator-(long lhs, const BigReal& rhs) {
  BigReal out(rhs.precision());
  mpfr_si_sub(out.value_, lhs, rhs.value_, MPFR_RNDN);
  return out;
}

BigReal operator/(long lhs, const BigReal& rhs) {
  if (rhs.is_zero()) throw DomainError("division by zero");
  BigReal out(rhs.precision());
  mpfr_si_div(out.value_, lhs, rhs.value_, MPFR_RNDN);
  return out;
}

std::partial_ordering operator<=>(const BigReal& a, const BigReal& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.value_, b.value_);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

std::partial_ordering operator<=>(const BigReal& a, long b) {
  if (mpfr_nan_p(a.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp_si(a.value_, b);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

BigReal abs(const BigReal& x) {
  BigReal out(x);
  mpfr_abs(out.get(), out.get(), MPFR_RNDN);
  return out;
}

BigReal sqrt(const BigReal& x) {
  if (x.sign() < 0) throw DomainError("square root of a negative value");
  BigReal out(x.precision());
  mpfr_sqrt(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigReal root(const BigReal& x, unsigned long n) {
  if (n == 0) throw DomainError("zeroth root");
  if (x.sign() < 0 && n % 2 == 0) {
    throw DomainError("even root (" + std::to_string(n) + ") of a negative value");
  }
  BigReal out(x.precision());
  mpfr_rootn_ui(out.get(), x.get(), n, MPFR_RNDN);
  return out;
}

BigReal exp(const BigReal& x) {
  BigReal out(x.precision());
  mpfr_exp(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigReal log(const BigReal& x) {
  if (x.sign() <= 0) throw DomainError("logarithm of a nonpositive value");
  BigReal out(x.precision());
  mpfr_log(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigReal pow(const BigReal& x, long n) {
  if (n < 0 && x.is_zero()) throw DomainError("negative power of zero");
  BigReal out(x.precision());
  mpfr_pow_si(out.get(), x.get(), n, MPFR_RNDN);
  return out;
}

BigReal pow(const BigReal& x, const BigReal& y) {
  if (x.sign() < 0) throw DomainError("real power of a negative base");
  BigReal out(std::max(x.precision(), y.precision()));
  mpfr_pow(out.get(), x.get(), y.get(), MPFR_RNDN);
  return out;
}

BigReal pow_rational(const BigReal& x, std::int64_t num, std::int64_t den) {
  if (den <= 0) throw DomainError("rational exponent needs a positive denominator");
  if (den == 1) return pow(x, static_cast<long>(num));
  BigReal r = root(x, static_cast<unsigned long>(den));
  return pow(r, static_cast<long>(num));
}

BigReal pi(mpfr_prec_t bits) {
  BigReal out(bits);
  mpfr_const_pi(out.get(), MPFR_RNDN);
  return out;
}

const BigReal& max_abs(const BigReal& a, const BigReal& b) {
  return mpfr_cmpabs(a.get(), b.get()) >= 0 ? a : b;
}

BigReal relative_difference(const BigReal& a, const BigReal& b) {
  BigReal scale = abs(max_abs(a, b));
  BigReal diff = abs(a - b);
  if (scale.is_zero()) return diff;
  return diff / scale;
}

BigReal ten_to_minus(int exponent, mpfr_prec_t bits) {
  BigReal ten(10, bits);
  return pow(ten, -static_cast<long>(exponent));
}

}  // namespace theta_forge
