#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "theta_forge/big_real.hpp"

namespace theta_forge {

/// Reduced fraction num/den with num, den > 0.
class PositiveRational {
 public:
  PositiveRational() = default;
  PositiveRational(std::int64_t num, std::int64_t den = 1);

  /// Accepts "7", "3/8".
  static PositiveRational parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  std::string to_string() const;
  BigReal to_big(mpfr_prec_t bits) const;

  PositiveRational reciprocal() const { return PositiveRational(den_, num_); }
  friend PositiveRational operator*(const PositiveRational& a, const PositiveRational& b);
  friend PositiveRational operator/(const PositiveRational& a, const PositiveRational& b);
  friend bool operator==(const PositiveRational&, const PositiveRational&) = default;

 private:
  std::int64_t num_ = 1;
  std::int64_t den_ = 1;
};

enum class Family { r, r_prime, h, h_prime, l, l_prime, A, A_prime, h16 };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

/// One parameter instance, e.g. A'_{4,12} is {A_prime, 4, 12}.
struct ParamSpec {
  Family family = Family::A;
  PositiveRational k;
  PositiveRational n;

  /// "A_prime 4 12" style, whitespace separated.
  static ParamSpec parse(std::string_view text);
  std::string to_string() const;
  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

enum class NomeConvention { pi_sqrt, two_pi_sqrt, raw };

/// A nome q in (0, 1) stored together with log q, so rational powers q^a are
/// formed as exp(a log q) without repeated rounding.
class Nome {
 public:
  /// q = e^{-c pi sqrt(n/k)} with c = 1 (pi_sqrt) or 2 (two_pi_sqrt).
  static Nome from_convention(NomeConvention convention, const PositiveRational& k,
                              const PositiveRational& n, const Precision& prec);
  static Nome raw(const BigReal& q, const Precision& prec);

  const BigReal& value() const { return q_; }
  const BigReal& log_value() const { return log_q_; }
  NomeConvention convention() const { return convention_; }
  const std::optional<std::pair<PositiveRational, PositiveRational>>& provenance() const {
    return provenance_;
  }

  /// q^a for a positive rational a, as a raw nome.
  Nome power(const PositiveRational& a) const;

 private:
  Nome(BigReal q, BigReal log_q, NomeConvention c) : q_(std::move(q)), log_q_(std::move(log_q)), convention_(c) {}

  BigReal q_;
  BigReal log_q_;
  NomeConvention convention_ = NomeConvention::raw;
  std::optional<std::pair<PositiveRational, PositiveRational>> provenance_;  // (k, n)
};

NomeConvention convention_for(Family f);
Nome nome_for(const ParamSpec& spec, const Precision& prec);

/// Value of the family's defining theta quotient at its nome.
BigReal eval_param(const ParamSpec& spec, const Precision& prec);

/// Level-16 function h(q) = q psi(q^8) / phi(-q).
BigReal h16(const Nome& q, const Precision& prec);
/// h(q) = q prod (1-q^{16j})^2 (1-q^{2j}) / ((1-q^j)^2 (1-q^{8j})).
BigReal h16_product(const Nome& q, const Precision& prec);

/// (A_{k,n}, A_{k,1/n}); their product is 1.
std::pair<BigReal, BigReal> duality_A(const PositiveRational& k, const PositiveRational& n,
                                      const Precision& prec);

/// A_{1/2,n} = r_{2,n}^3.
BigReal a_half_from_r(const PositiveRational& n, const Precision& prec);

/// A'_{k/2,n} = r_{2,4n/k}^2 r_{k,2n} r_{2,nk} / (sqrt2 r_{2,n/k}^2).
BigReal a_prime_from_r(const PositiveRational& k, const PositiveRational& n, const Precision& prec);

/// The product formula with the index map r_{2,4n}^2 r_{k,4n} r_{2,k^2 n} / r_{2,n}^2
/// exactly as it was published; kept for measurement only (it does not hold).
BigReal a_prime_from_r_as_printed(const PositiveRational& k, const PositiveRational& n,
                                  const Precision& prec);

}  // namespace theta_forge
