#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "theta_forge/big_real.hpp"
#include "theta_forge/relations.hpp"

namespace theta_forge {

inline constexpr size_t kMaxBasisSize = 200;
inline constexpr int kMaxBasisExponent = 16;
inline constexpr int kHeldOutSamples = 3;
inline constexpr int kMinDiscoveryDigits = 40;

/// Monomials in bound theta quotients, searched for a linear dependency.
struct MonomialBasis {
  std::vector<VariableBinding> variables;
  std::vector<std::vector<int>> monomials;

  /// {"variables": ["P=phi(-q)/q/psi(q^8)@1", ...], "monomials": [[0,0],[1,0],...]}
  static MonomialBasis from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Throws UsageError on size, exponent-range or shape violations.
  void validate() const;
};

/// N evenly spaced nomes in [0.06, 0.5].
std::vector<BigReal> default_discovery_samples(size_t count, mpfr_prec_t bits);

struct DiscoveryOutcome {
  std::optional<Relation> relation;
  BigReal held_out_residual;
  int digits_used = 0;
  std::string note;
};

/// Looks for sum c_j m_j = 0 with c_j in Z[sqrt2], |a|,|b| <= coeff_bound, fitted on all but the
/// last three samples and checked on those three. Dependencies among sample-constant monomials
/// alone are not reported.
DiscoveryOutcome discover_relation(const MonomialBasis& basis, const std::vector<BigReal>& q_samples,
                                   const Precision& prec, int coeff_bound);

std::optional<Relation> find_relation(const MonomialBasis& basis, const std::vector<BigReal>& q_samples,
                                      const Precision& prec, int coeff_bound);

/// Divides by the Z[sqrt2] gcd, picks the unit power (1+sqrt2)^k, |k| <= 8, of least height,
/// and makes the first nonzero coefficient positive.
std::vector<ZSqrt2> normalize_coefficients(std::vector<ZSqrt2> coeffs);

}  // namespace theta_forge
