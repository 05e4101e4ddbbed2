#pragma once

#include "theta_forge/big_real.hpp"

namespace theta_forge {

// Ramanujan's theta functions. Arguments are real with |x| < kQMax; negative
// arguments are summed as their own alternating series, so phi(-q) never goes
// through a positive-q evaluation path.

/// f(a, b) = sum_{n in Z} a^{n(n+1)/2} b^{n(n-1)/2}, |ab| < 1.
BigReal f_general(const BigReal& a, const BigReal& b, const Precision& prec);
/// Jacobi triple product (-a; ab)(-b; ab)(ab; ab).
BigReal f_general_product(const BigReal& a, const BigReal& b, const Precision& prec);

/// phi(x) = sum_{n in Z} x^{n^2}.
BigReal phi(const BigReal& x, const Precision& prec);
/// psi(x) = sum_{n >= 0} x^{n(n+1)/2}.
BigReal psi(const BigReal& x, const Precision& prec);
/// f(-x) = (x; x)_inf, summed via Euler's pentagonal series.
BigReal f_neg(const BigReal& x, const Precision& prec);

BigReal phi_product(const BigReal& x, const Precision& prec);
BigReal psi_product(const BigReal& x, const Precision& prec);
BigReal f_neg_product(const BigReal& x, const Precision& prec);

/// Squared modulus and friends attached to a nome q in (0, 1).
struct ModulusData {
  BigReal alpha;            // k^2
  BigReal one_minus_alpha;  // (phi(-q)/phi(q))^4, formed without subtraction
  BigReal z;                // phi(q)^2
};

ModulusData modulus_data(const BigReal& q, const Precision& prec);

/// alpha = 1 - (phi(-q)/phi(q))^4.
BigReal alpha_of_q(const BigReal& q, const Precision& prec);
BigReal z_of_q(const BigReal& q, const Precision& prec);

inline constexpr int kMaxDegree = 64;

/// m = phi(q)^2 / phi(q^n)^2.
BigReal multiplier(const BigReal& q, int degree, const Precision& prec);
/// beta = alpha(q^n), the modulus of degree n over alpha(q).
BigReal beta_of_degree(const BigReal& q, int degree, const Precision& prec);

/// e^{-pi K(k')/K(k)} with k^2 = alpha(q); reproduces q.
BigReal nome_round_trip(const BigReal& q, const Precision& prec);

}  // namespace theta_forge
