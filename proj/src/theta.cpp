#include "theta_forge/theta.hpp"

#include <cmath>
#include <string>

#include "theta_forge/errors.hpp"
#include "theta_forge/numeric_core.hpp"

namespace theta_forge {

namespace {

void require_open_unit(const BigReal& q, const char* what) {
  if (q.sign() <= 0 || q >= 1) throw DomainError(std::string(what) + ": nome must lie in (0, 1)");
  require_nome_in_range(q, what);
}

double ipow(double base, std::int64_t e) { return std::pow(base, static_cast<double>(e)); }

}  // namespace

BigReal f_general(const BigReal& a_in, const BigReal& b_in, const Precision& prec) {
  const mpfr_prec_t bits = prec.bits();
  const BigReal a = a_in.rounded_to(bits);
  const BigReal b = b_in.rounded_to(bits);
  const BigReal ab = a * b;
  if (abs(ab) >= 1) throw DomainError("f(a, b) requires |ab| < 1");
  require_nome_in_range(ab, "f_general");
  const double abs_a = std::fabs(a.to_double());
  const double abs_b = std::fabs(b.to_double());
  const double abs_ab = std::fabs(ab.to_double());

  // n >= 0: T_0 = 1, T_{n+1} = T_n a^{n+1} b^n.
  BigReal t(1, bits);
  BigReal step = a;  // a^{n+1} b^n
  auto forward = [&](std::int64_t n) {
    if (n > 0) {
      t *= step;
      step *= ab;
    }
    return t;
  };
  auto forward_ratio = [&](std::int64_t n) { return abs_a * ipow(abs_ab, n); };

  // n = -m, m >= 1: U_1 = b, U_{m+1} = U_m a^m b^{m+1}.
  BigReal u = b;
  BigReal back_step = ab * b;  // a^m b^{m+1}
  auto backward = [&](std::int64_t m) {
    if (m > 0) {
      u *= back_step;
      back_step *= ab;
    }
    return u;
  };
  auto backward_ratio = [&](std::int64_t m) { return abs_b * ipow(abs_ab, m + 1); };

  return sum_series(forward, forward_ratio, prec) + sum_series(backward, backward_ratio, prec);
}

BigReal f_general_product(const BigReal& a_in, const BigReal& b_in, const Precision& prec) {
  const mpfr_prec_t bits = prec.bits();
  const BigReal a = a_in.rounded_to(bits);
  const BigReal b = b_in.rounded_to(bits);
  const BigReal ab = a * b;
  if (abs(ab) >= 1) throw DomainError("f(a, b) requires |ab| < 1");
  return qpochhammer_inf(-a, ab, prec) * qpochhammer_inf(-b, ab, prec) *
         qpochhammer_inf(ab, ab, prec);
}

BigReal phi(const BigReal& x_in, const Precision& prec) {
  require_nome_in_range(x_in, "phi");
  const mpfr_prec_t bits = prec.bits();
  const BigReal x = x_in.rounded_to(bits);
  const double ax = std::fabs(x.to_double());
  // Term j is x^{(j+1)^2}; successive ratio x^{2j+3}.
  BigReal t = x;
  BigReal step = x * x * x;
  const BigReal x2 = x * x;
  auto term = [&](std::int64_t j) {
    if (j > 0) {
      t *= step;
      step *= x2;
    }
    return t;
  };
  auto ratio = [ax](std::int64_t j) { return ipow(ax, 2 * j + 3); };
  return 1 + 2 * sum_series(term, ratio, prec);
}

BigReal psi(const BigReal& x_in, const Precision& prec) {
  require_nome_in_range(x_in, "psi");
  const mpfr_prec_t bits = prec.bits();
  const BigReal x = x_in.rounded_to(bits);
  const double ax = std::fabs(x.to_double());
  BigReal t(1, bits);
  BigReal step = x;  // x^{n}, multiplier from T_{n-1} to T_n
  auto term = [&](std::int64_t n) {
    if (n > 0) {
      t *= step;
      step *= x;
    }
    return t;
  };
  auto ratio = [ax](std::int64_t n) { return ipow(ax, n + 1); };
  return sum_series(term, ratio, prec);
}

BigReal f_neg(const BigReal& x_in, const Precision& prec) {
  require_nome_in_range(x_in, "f_neg");
  const mpfr_prec_t bits = prec.bits();
  const BigReal x = x_in.rounded_to(bits);
  const double ax = std::fabs(x.to_double());
  const BigReal x3 = x * x * x;
  // Pentagonal exponents e1 = n(3n-1)/2 and e2 = n(3n+1)/2 = e1 + n.
  BigReal lower(1, bits);    // x^{e1(n)}
  BigReal lower_step = x;    // x^{3n+1}, from e1(n) to e1(n+1)
  BigReal x_to_n(1, bits);   // x^n
  auto term = [&](std::int64_t n) {
    if (n == 0) return BigReal(1, bits);
    lower *= lower_step;
    lower_step *= x3;
    x_to_n *= x;
    BigReal pair = lower + lower * x_to_n;
    return (n % 2 == 1) ? -pair : pair;
  };
  auto ratio = [ax](std::int64_t n) { return ipow(ax, 3 * n + 1); };
  return sum_series(term, ratio, prec);
}

BigReal phi_product(const BigReal& x_in, const Precision& prec) {
  const mpfr_prec_t bits = prec.bits();
  const BigReal x = x_in.rounded_to(bits);
  const BigReal x2 = x * x;
  const BigReal half = qpochhammer_inf(-x, x2, prec);
  return half * half * qpochhammer_inf(x2, x2, prec);
}

BigReal psi_product(const BigReal& x_in, const Precision& prec) {
  const mpfr_prec_t bits = prec.bits();
  const BigReal x = x_in.rounded_to(bits);
  const BigReal x2 = x * x;
  return qpochhammer_inf(x2, x2, prec) / qpochhammer_inf(x, x2, prec);
}

BigReal f_neg_product(const BigReal& x, const Precision& prec) {
  return qpochhammer_inf(x, x, prec);
}

ModulusData modulus_data(const BigReal& q, const Precision& prec) {
  require_open_unit(q, "modulus_data");
  const BigReal plus = phi(q, prec);
  const BigReal minus = phi(-q, prec);
  const BigReal ratio = minus / plus;
  BigReal comp = pow(ratio, 4);
  BigReal alpha = 1 - comp;
  return ModulusData{std::move(alpha), std::move(comp), plus * plus};
}

BigReal alpha_of_q(const BigReal& q, const Precision& prec) { return modulus_data(q, prec).alpha; }

BigReal z_of_q(const BigReal& q, const Precision& prec) {
  require_nome_in_range(q, "z_of_q");
  const BigReal p = phi(q, prec);
  return p * p;
}

namespace {

void require_degree(int degree) {
  if (degree < 1 || degree > kMaxDegree) {
    throw DomainError("degree must lie in [1, " + std::to_string(kMaxDegree) + "]");
  }
}

}  // namespace

BigReal multiplier(const BigReal& q, int degree, const Precision& prec) {
  require_open_unit(q, "multiplier");
  require_degree(degree);
  const BigReal ratio = phi(q, prec) / phi(pow(q.rounded_to(prec.bits()), degree), prec);
  return ratio * ratio;
}

BigReal beta_of_degree(const BigReal& q, int degree, const Precision& prec) {
  require_open_unit(q, "beta_of_degree");
  require_degree(degree);
  return alpha_of_q(pow(q.rounded_to(prec.bits()), degree), prec);
}

BigReal nome_round_trip(const BigReal& q, const Precision& prec) {
  require_open_unit(q, "nome_round_trip");
  const mpfr_prec_t bits = prec.bits();
  const ModulusData md = modulus_data(q, prec);
  const BigReal k = sqrt(md.alpha);
  const BigReal k_prime = sqrt(md.one_minus_alpha);
  // K(k') / K(k) = agm(1, k') / agm(1, k).
  const BigReal K = elliptic_K_from_complement(k_prime, prec);
  const BigReal K_prime = elliptic_K_from_complement(k, prec);
  return exp(-pi(bits) * K_prime / K);
}

}  // namespace theta_forge
