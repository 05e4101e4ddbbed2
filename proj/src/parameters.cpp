#include "theta_forge/parameters.hpp"

#include <array>
#include <charconv>
#include <numeric>
#include <sstream>

#include "theta_forge/errors.hpp"
#include "theta_forge/numeric_core.hpp"
#include "theta_forge/theta.hpp"

namespace theta_forge {

namespace {

std::int64_t parse_positive_int(std::string_view text) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || value <= 0) {
    throw UsageError("expected a positive integer, got '" + std::string(text) + "'");
  }
  return value;
}

constexpr std::array<std::pair<Family, std::string_view>, 9> kFamilyNames{{
    {Family::r, "r"},
    {Family::r_prime, "r_prime"},
    {Family::h, "h"},
    {Family::h_prime, "h_prime"},
    {Family::l, "l"},
    {Family::l_prime, "l_prime"},
    {Family::A, "A"},
    {Family::A_prime, "A_prime"},
    {Family::h16, "h16"},
}};

}  // namespace

PositiveRational::PositiveRational(std::int64_t num, std::int64_t den) {
  if (num <= 0 || den <= 0) throw UsageError("positive rational needs positive numerator and denominator");
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

PositiveRational PositiveRational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return PositiveRational(parse_positive_int(text));
  return PositiveRational(parse_positive_int(text.substr(0, slash)),
                          parse_positive_int(text.substr(slash + 1)));
}

std::string PositiveRational::to_string() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

BigReal PositiveRational::to_big(mpfr_prec_t bits) const {
  return BigReal::from_rational(num_, den_, bits);
}

PositiveRational operator*(const PositiveRational& a, const PositiveRational& b) {
  // Cross-reduce first to keep the intermediates small.
  const std::int64_t g1 = std::gcd(a.num_, b.den_);
  const std::int64_t g2 = std::gcd(b.num_, a.den_);
  return PositiveRational((a.num_ / g1) * (b.num_ / g2), (a.den_ / g2) * (b.den_ / g1));
}

PositiveRational operator/(const PositiveRational& a, const PositiveRational& b) {
  return a * b.reciprocal();
}

std::string_view family_name(Family f) {
  for (const auto& [family, name] : kFamilyNames) {
    if (family == f) return name;
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (const auto& [family, known] : kFamilyNames) {
    if (known == name) return family;
  }
  throw UsageError("unknown parameter family '" + std::string(name) + "'");
}

ParamSpec ParamSpec::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string family, k, n, extra;
  if (!(in >> family >> k >> n) || (in >> extra)) {
    throw UsageError("parameter spec must read '<family> <k> <n>', got '" + std::string(text) + "'");
  }
  return ParamSpec{parse_family(family), PositiveRational::parse(k), PositiveRational::parse(n)};
}

std::string ParamSpec::to_string() const {
  return std::string(family_name(family)) + " " + k.to_string() + " " + n.to_string();
}

Nome Nome::from_convention(NomeConvention convention, const PositiveRational& k,
                           const PositiveRational& n, const Precision& prec) {
  if (convention == NomeConvention::raw) throw UsageError("raw nomes carry no (k, n) provenance");
  const mpfr_prec_t bits = prec.bits();
  BigReal log_q = -pi(bits) * sqrt((n / k).to_big(bits));
  if (convention == NomeConvention::two_pi_sqrt) log_q *= 2;
  BigReal q = exp(log_q);
  Nome out(std::move(q), std::move(log_q), convention);
  out.provenance_ = std::make_pair(k, n);
  return out;
}

Nome Nome::raw(const BigReal& q, const Precision& prec) {
  if (q.sign() <= 0 || q >= 1) throw DomainError("nome must lie in (0, 1)");
  const BigReal value = q.rounded_to(prec.bits());
  return Nome(value, log(value), NomeConvention::raw);
}

Nome Nome::power(const PositiveRational& a) const {
  if (a.is_integer()) {
    return Nome(pow(q_, static_cast<long>(a.num())), log_q_ * static_cast<long>(a.num()),
                NomeConvention::raw);
  }
  BigReal log_q = log_q_ * a.to_big(log_q_.precision());
  BigReal q = exp(log_q);
  return Nome(std::move(q), std::move(log_q), NomeConvention::raw);
}

NomeConvention convention_for(Family f) {
  switch (f) {
    case Family::r:
    case Family::h_prime:
      return NomeConvention::two_pi_sqrt;
    default:
      return NomeConvention::pi_sqrt;
  }
}

Nome nome_for(const ParamSpec& spec, const Precision& prec) {
  return Nome::from_convention(convention_for(spec.family), spec.k, spec.n, prec);
}

namespace {

/// q^e for rational exponent e = num/den (possibly negative).
BigReal q_power(const Nome& q, std::int64_t num, std::int64_t den) {
  BigReal e = q.log_value() * static_cast<long>(num);
  e /= static_cast<long>(den);
  return exp(e);
}

BigReal fourth_root(const PositiveRational& k, mpfr_prec_t bits) { return root(k.to_big(bits), 4); }

}  // namespace

BigReal eval_param(const ParamSpec& spec, const Precision& prec) {
  const mpfr_prec_t bits = prec.bits();
  const Nome q = nome_for(spec, prec);
  require_nome_in_range(q.value(), "eval_param");
  const PositiveRational& k = spec.k;
  const std::int64_t kn = k.num();
  const std::int64_t kd = k.den();
  const BigReal& x = q.value();
  const BigReal xk = q.power(k).value();

  switch (spec.family) {
    case Family::r:  // f(-q) / (k^{1/4} q^{(k-1)/24} f(-q^k))
      return f_neg(x, prec) / (fourth_root(k, bits) * q_power(q, kn - kd, 24 * kd) * f_neg(xk, prec));
    case Family::r_prime:  // f(q) / (k^{1/4} q^{(k-1)/24} f(q^k)); f(q) = f_neg(-q)
      return f_neg(-x, prec) / (fourth_root(k, bits) * q_power(q, kn - kd, 24 * kd) * f_neg(-xk, prec));
    case Family::h:
      return phi(x, prec) / (fourth_root(k, bits) * phi(xk, prec));
    case Family::h_prime:
      return phi(-x, prec) / (fourth_root(k, bits) * phi(-xk, prec));
    case Family::l:
      return psi(-x, prec) / (fourth_root(k, bits) * q_power(q, kn - kd, 8 * kd) * psi(-xk, prec));
    case Family::l_prime:
      return psi(x, prec) / (fourth_root(k, bits) * q_power(q, kn - kd, 8 * kd) * psi(xk, prec));
    case Family::A:
    case Family::A_prime: {
      const BigReal numerator = spec.family == Family::A ? phi(-x, prec) : phi(x, prec);
      const BigReal x2k = q.power(k * PositiveRational(2)).value();
      return numerator / (2 * fourth_root(k, bits) * q_power(q, kn, 4 * kd) * psi(x2k, prec));
    }
    case Family::h16:
      return h16(q, prec);
  }
  throw UsageError("unhandled parameter family");
}

BigReal h16(const Nome& q, const Precision& prec) {
  const BigReal& x = q.value();
  require_nome_in_range(x, "h16");
  return x * psi(q.power(PositiveRational(8)).value(), prec) / phi(-x, prec);
}

BigReal h16_product(const Nome& q, const Precision& prec) {
  const BigReal& x = q.value();
  require_nome_in_range(x, "h16_product");
  const BigReal x2 = q.power(PositiveRational(2)).value();
  const BigReal x8 = q.power(PositiveRational(8)).value();
  const BigReal x16 = q.power(PositiveRational(16)).value();
  const BigReal p16 = qpochhammer_inf(x16, x16, prec);
  const BigReal p1 = qpochhammer_inf(x, x, prec);
  return x * p16 * p16 * qpochhammer_inf(x2, x2, prec) / (p1 * p1 * qpochhammer_inf(x8, x8, prec));
}

std::pair<BigReal, BigReal> duality_A(const PositiveRational& k, const PositiveRational& n,
                                      const Precision& prec) {
  return {eval_param(ParamSpec{Family::A, k, n}, prec),
          eval_param(ParamSpec{Family::A, k, n.reciprocal()}, prec)};
}

BigReal a_half_from_r(const PositiveRational& n, const Precision& prec) {
  return pow(eval_param(ParamSpec{Family::r, PositiveRational(2), n}, prec), 3);
}

namespace {

BigReal r_value(const PositiveRational& k, const PositiveRational& n, const Precision& prec) {
  return eval_param(ParamSpec{Family::r, k, n}, prec);
}

}  // namespace

BigReal a_prime_from_r(const PositiveRational& k, const PositiveRational& n, const Precision& prec) {
  if (k.num() <= k.den()) throw DomainError("a_prime_from_r requires k > 1");
  const PositiveRational two(2);
  const BigReal r_a = r_value(two, PositiveRational(4) * n / k, prec);
  const BigReal r_b = r_value(k, two * n, prec);
  const BigReal r_c = r_value(two, n * k, prec);
  const BigReal r_d = r_value(two, n / k, prec);
  return r_a * r_a * r_b * r_c / (sqrt(BigReal(2, prec.bits())) * r_d * r_d);
}

BigReal a_prime_from_r_as_printed(const PositiveRational& k, const PositiveRational& n,
                                  const Precision& prec) {
  const PositiveRational two(2);
  const PositiveRational four_n = PositiveRational(4) * n;
  const BigReal r_a = r_value(two, four_n, prec);
  const BigReal r_b = r_value(k, four_n, prec);
  const BigReal r_c = r_value(two, k * k * n, prec);
  const BigReal r_d = r_value(two, n, prec);
  return r_a * r_a * r_b * r_c / (r_d * r_d);
}

}  // namespace theta_forge
