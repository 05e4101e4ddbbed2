#pragma once

#include <cstdint>
#include <functional>

#include "theta_forge/big_real.hpp"

namespace theta_forge {

/// Nomes at or beyond this magnitude are refused rather than summed slowly.
inline constexpr double kQMax = 0.9995;
inline constexpr std::int64_t kMaxSeriesTerms = 20'000'000;

/// Term n of a series; invoked with n = 0, 1, 2, ... in order, so generators
/// may keep running powers as state.
using TermGenerator = std::function<BigReal(std::int64_t)>;

/// Upper bound on |t_{m+1} / t_m| for every m >= n. Values >= 1 mean the
/// geometric tail estimate does not apply yet.
using RatioBound = std::function<double(std::int64_t)>;

/// Sums until the geometric tail bound |t_n| rho/(1 - rho) drops below
/// 2^-(p+8) |S|. Throws PrecisionUnreachable when max_terms is exhausted.
BigReal sum_series(const TermGenerator& term, const RatioBound& ratio_bound,
                   const Precision& prec, std::int64_t max_terms = kMaxSeriesTerms);

/// (a; q)_inf = prod_{n>=0} (1 - a q^n), truncated once
/// |a| |q|^{N+1} / (1 - |q|) < 2^-(p+4).
BigReal qpochhammer_inf(const BigReal& a, const BigReal& q, const Precision& prec);

/// Arithmetic-geometric mean; a, b > 0.
BigReal agm(const BigReal& a, const BigReal& b, const Precision& prec);

/// K(k) = pi / (2 agm(1, sqrt(1 - k^2))), 0 <= k < 1.
BigReal elliptic_K(const BigReal& k, const Precision& prec);

/// K expressed through the complementary modulus: pi / (2 agm(1, k')).
/// Avoids forming 1 - k^2 when k' is known directly.
BigReal elliptic_K_from_complement(const BigReal& k_prime, const Precision& prec);

/// (pi/2) sum ((1/2)_n / n!)^2 k^{2n}; independent route for K(k).
BigReal elliptic_K_series(const BigReal& k, const Precision& prec);

/// Throws PrecisionUnreachable when |q| >= kQMax.
void require_nome_in_range(const BigReal& q, const char* what);

}  // namespace theta_forge
