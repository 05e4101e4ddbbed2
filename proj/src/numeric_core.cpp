#include "theta_forge/numeric_core.hpp"

#include <cmath>
#include <string>

#include "theta_forge/errors.hpp"

namespace theta_forge {

namespace {

BigReal epsilon_bits(mpfr_prec_t bits, long extra) {
  BigReal eps(1, bits);
  mpfr_mul_2si(eps.get(), eps.get(), -(static_cast<long>(bits) + extra), MPFR_RNDN);
  return eps;
}

}  // namespace

void require_nome_in_range(const BigReal& q, const char* what) {
  if (!q.is_finite()) throw DomainError(std::string(what) + ": non-finite nome");
  if (std::fabs(q.to_double()) >= kQMax) {
    throw PrecisionUnreachable(std::string(what) + ": |q| = " + q.to_scientific(8) +
                               " is at or beyond the ceiling " + std::to_string(kQMax));
  }
}

BigReal sum_series(const TermGenerator& term, const RatioBound& ratio_bound,
                   const Precision& prec, std::int64_t max_terms) {
  const mpfr_prec_t bits = prec.bits();
  const BigReal eps = epsilon_bits(bits, 8);
  BigReal sum(bits);
  for (std::int64_t n = 0; n < max_terms; ++n) {
    BigReal t = term(n);
    sum += t;
    const double rho = ratio_bound(n);
    if (rho < 1.0) {
      BigReal tail = abs(t);
      tail *= BigReal::from_double(rho / (1.0 - rho), bits);
      if (tail <= eps * abs(sum)) return sum.rounded_to(bits);
    }
  }
  throw PrecisionUnreachable("series did not reach the requested precision within " +
                             std::to_string(max_terms) + " terms");
}

BigReal qpochhammer_inf(const BigReal& a, const BigReal& q, const Precision& prec) {
  require_nome_in_range(q, "qpochhammer_inf");
  const mpfr_prec_t bits = prec.bits();
  const BigReal eps = epsilon_bits(bits, 4);
  const BigReal one_minus_abs_q = 1 - abs(q.rounded_to(bits));
  BigReal product(1, bits);
  BigReal factor_shift = a.rounded_to(bits);  // a q^n
  BigReal abs_tail(bits);
  for (std::int64_t n = 0; n < kMaxSeriesTerms; ++n) {
    BigReal factor = 1 - factor_shift;
    if (factor.is_zero()) {
      throw DomainError("qpochhammer_inf: factor (1 - a q^" + std::to_string(n) + ") vanishes");
    }
    product *= factor;
    factor_shift *= q;
    // Remaining factors n+1, n+2, ... perturb the product by at most
    // sum_{m>n} |a q^m| <= |a q^{n+1}| / (1 - |q|).
    abs_tail = abs(factor_shift) / one_minus_abs_q;
    if (abs_tail < eps) return product;
  }
  throw PrecisionUnreachable("qpochhammer_inf: product did not converge within the term cap");
}

BigReal agm(const BigReal& a_in, const BigReal& b_in, const Precision& prec) {
  if (a_in.sign() <= 0 || b_in.sign() <= 0) throw DomainError("agm: arguments must be positive");
  const mpfr_prec_t bits = prec.bits();
  const BigReal eps = epsilon_bits(bits, 4);
  BigReal a = a_in.rounded_to(bits);
  BigReal b = b_in.rounded_to(bits);
  for (int iter = 0; iter < 10'000; ++iter) {
    if (abs(a - b) <= eps * a) return a;
    BigReal next_a = (a + b) / 2;
    b = sqrt(a * b);
    a = std::move(next_a);
  }
  throw PrecisionUnreachable("agm: iteration did not settle");
}

BigReal elliptic_K_from_complement(const BigReal& k_prime, const Precision& prec) {
  if (k_prime.sign() <= 0) throw DomainError("elliptic_K: modulus must be below 1");
  if (k_prime > 1) throw DomainError("elliptic_K: complementary modulus above 1");
  const mpfr_prec_t bits = prec.bits();
  return pi(bits) / (2 * agm(BigReal(1, bits), k_prime, prec));
}

BigReal elliptic_K(const BigReal& k, const Precision& prec) {
  if (k.sign() < 0) throw DomainError("elliptic_K: modulus must be nonnegative");
  if (k >= 1) throw DomainError("elliptic_K: modulus must be below 1");
  const mpfr_prec_t bits = prec.bits();
  const BigReal kk = k.rounded_to(bits);
  return elliptic_K_from_complement(sqrt(1 - kk * kk), prec);
}

BigReal elliptic_K_series(const BigReal& k, const Precision& prec) {
  if (k.sign() < 0) throw DomainError("elliptic_K_series: modulus must be nonnegative");
  if (k >= 1) throw DomainError("elliptic_K_series: modulus must be below 1");
  const mpfr_prec_t bits = prec.bits();
  const BigReal k2 = k.rounded_to(bits) * k.rounded_to(bits);
  const double k2d = k2.to_double();
  BigReal t(1, bits);
  auto term = [&](std::int64_t n) {
    if (n > 0) {
      // t_n = t_{n-1} ((n - 1/2)/n)^2 k^2
      t *= (2 * n - 1) * (2 * n - 1);
      t /= 4 * n * n;
      t *= k2;
    }
    return t;
  };
  // ((m + 1/2)/(m + 1))^2 < 1, so k^2 bounds every later ratio.
  auto ratio = [k2d](std::int64_t) { return k2d; };
  return pi(bits) / 2 * sum_series(term, ratio, prec);
}

}  // namespace theta_forge
