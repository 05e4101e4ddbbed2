#include "theta_forge/zsqrt2.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "theta_forge/errors.hpp"

namespace theta_forge {

std::int64_t ZSqrt2::norm() const { return a * a - 2 * b * b; }

std::int64_t ZSqrt2::height() const { return std::max(std::llabs(a), std::llabs(b)); }

BigReal ZSqrt2::to_big(mpfr_prec_t bits) const {
  BigReal out(a, bits);
  if (b != 0) out += BigReal(b, bits) * sqrt(BigReal(2, bits));
  return out;
}

double ZSqrt2::to_double() const { return static_cast<double>(a) + static_cast<double>(b) * std::sqrt(2.0); }

std::string ZSqrt2::to_string() const { return "(" + std::to_string(a) + "," + std::to_string(b) + ")"; }

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) {
    throw UsageError("bad coefficient '" + std::string(whole) + "'");
  }
  return v;
}

std::int64_t div_round(std::int64_t num, std::int64_t den) {
  // Nearest integer to num/den, ties away from zero.
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t twice = 2 * num + (num >= 0 ? den : -den);
  return twice / (2 * den);
}

}  // namespace

ZSqrt2 ZSqrt2::parse(std::string_view text) {
  if (text.size() < 5 || text.front() != '(' || text.back() != ')') {
    throw UsageError("coefficient must look like (a,b): '" + std::string(text) + "'");
  }
  const auto inner = text.substr(1, text.size() - 2);
  const auto comma = inner.find(',');
  if (comma == std::string_view::npos) throw UsageError("coefficient missing ',': '" + std::string(text) + "'");
  return {parse_int(inner.substr(0, comma), text), parse_int(inner.substr(comma + 1), text)};
}

ZSqrt2 divide_nearest(const ZSqrt2& x, const ZSqrt2& y) {
  if (y.is_zero()) throw DomainError("division by zero in Z[sqrt2]");
  const ZSqrt2 num = x * y.conjugate();
  const std::int64_t n = y.norm();
  return {div_round(num.a, n), div_round(num.b, n)};
}

ZSqrt2 divide_exact(const ZSqrt2& x, const ZSqrt2& y) {
  const ZSqrt2 q = divide_nearest(x, y);
  if (!(q * y == x)) throw InconsistencyError(x.to_string() + " is not divisible by " + y.to_string());
  return q;
}

ZSqrt2 gcd(ZSqrt2 x, ZSqrt2 y) {
  while (!y.is_zero()) {
    const ZSqrt2 r = x - divide_nearest(x, y) * y;
    x = y;
    y = r;
  }
  return x;
}

ZSqrt2 unit_power(int k) {
  ZSqrt2 out{1, 0};
  const ZSqrt2 step = k >= 0 ? ZSqrt2{1, 1} : ZSqrt2{-1, 1};  // (1+sqrt2)^-1 = sqrt2-1
  for (int i = 0; i < std::abs(k); ++i) out = out * step;
  return out;
}

}  // namespace theta_forge
