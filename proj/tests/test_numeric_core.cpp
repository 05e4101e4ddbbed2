#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "theta_forge/errors.hpp"
#include "theta_forge/numeric_core.hpp"

using namespace theta_forge;
using test_support::oracle;
using test_support::oracles;
using test_support::rel_diff;
using test_support::tiny;

TEST_CASE("precision maps digits to enough bits") {
  const Precision p50(50);
  CHECK(p50.bits() >= static_cast<mpfr_prec_t>((50 + 15) * 3.3219));
  CHECK(Precision(80).bits() > p50.bits());
  CHECK(p50.with_guard(30).bits() > p50.bits());
  CHECK_THROWS_AS(Precision(5), UsageError);
  CHECK_THROWS_AS(Precision(50, -1), UsageError);
}

TEST_CASE("decimal text round trips through BigReal") {
  const mpfr_prec_t bits = Precision(40).bits();
  const BigReal x = BigReal::from_string("1.2345678901234567890123456789", bits);
  CHECK(x.to_decimal(29) == "1.2345678901234567890123456789");
  CHECK(BigReal::from_rational(1, 4, bits).to_decimal(3) == "0.250");
  CHECK(BigReal(1, bits).to_decimal(5) == "1.0000");
  CHECK(BigReal::from_rational(-3, 2, bits).to_decimal(2) == "-1.5");
}

TEST_CASE("ten_to_minus and relative_difference") {
  const mpfr_prec_t bits = Precision(50).bits();
  CHECK(ten_to_minus(3, bits).to_double() == doctest::Approx(1e-3));
  const BigReal a(2, bits);
  CHECK(relative_difference(a, a).is_zero());
  CHECK(rel_diff(BigReal(1, bits), BigReal(2, bits)) == doctest::Approx(0.5));
  CHECK(relative_difference(BigReal(0, bits), BigReal(0, bits)).is_zero());
}

TEST_CASE("geometric series sums to its closed form") {
  const Precision prec(60);
  const mpfr_prec_t bits = prec.bits();
  const BigReal half = BigReal::from_rational(1, 2, bits);
  BigReal power(1, bits);
  const BigReal sum = sum_series(
      [&](std::int64_t n) {
        if (n > 0) power *= half;
        return power;
      },
      [](std::int64_t) { return 0.5; }, prec);
  CHECK(rel_diff(sum, BigReal(2, bits)) < tiny(60));
}

TEST_CASE("series that never meets its tail bound reports precision unreachable") {
  const Precision prec(20);
  const BigReal one(1, prec.bits());
  CHECK_THROWS_AS(sum_series([&](std::int64_t) { return one; }, [](std::int64_t) { return 2.0; }, prec, 1000),
                  PrecisionUnreachable);
}

TEST_CASE("q-Pochhammer matches the reference value") {
  const Precision prec(50);
  const mpfr_prec_t bits = prec.bits();
  const BigReal half = BigReal::from_rational(1, 2, bits);
  const BigReal got = qpochhammer_inf(half, half, prec);
  CHECK(rel_diff(got, oracle(oracles()["constants"]["qpoch_half_half"], bits)) < tiny(48));
  CHECK(got.to_decimal(13) == "0.2887880950866");
  for (const auto& row : oracles()["theta"]) {
    const BigReal q = BigReal::from_string(row["q"].get<std::string>(), bits);
    if (!(q.sign() > 0) || q.to_double() > 0.6) continue;
    CHECK(rel_diff(qpochhammer_inf(q, q, prec), oracle(row["qpoch_q_q"], bits)) < tiny(48));
  }
}

TEST_CASE("AGM and complete elliptic integral") {
  const Precision prec(50);
  const mpfr_prec_t bits = prec.bits();
  const BigReal root2 = sqrt(BigReal(2, bits));
  const BigReal m = agm(BigReal(1, bits), root2, prec);
  CHECK(rel_diff(m, oracle(oracles()["constants"]["agm_1_sqrt2"], bits)) < tiny(48));
  CHECK(m.to_decimal(15) == "1.19814023473559");

  const BigReal k = BigReal(1, bits) / root2;
  const BigReal big_k = elliptic_K(k, prec);
  CHECK(rel_diff(big_k, oracle(oracles()["constants"]["K_inv_sqrt2"], bits)) < tiny(48));
  CHECK(big_k.to_decimal(15) == "1.85407467730137");

  const BigReal k06 = BigReal::from_rational(3, 5, bits);
  CHECK(rel_diff(elliptic_K(k06, prec), oracle(oracles()["constants"]["K_0_6"], bits)) < tiny(48));
  CHECK(rel_diff(elliptic_K_series(k06, prec), elliptic_K(k06, prec)) < tiny(48));
  CHECK(rel_diff(elliptic_K_from_complement(BigReal::from_rational(4, 5, bits), prec), elliptic_K(k06, prec)) <
        tiny(48));
  CHECK(rel_diff(elliptic_K(BigReal(0, bits), prec), pi(bits) / 2) < tiny(48));
}

TEST_CASE("nome ceiling") {
  const mpfr_prec_t bits = Precision(30).bits();
  CHECK_NOTHROW(require_nome_in_range(BigReal::from_string("0.999", bits), "test"));
  CHECK_THROWS_AS(require_nome_in_range(BigReal::from_string("0.9995", bits), "test"), PrecisionUnreachable);
  CHECK_THROWS_AS(require_nome_in_range(BigReal::from_string("-0.99999", bits), "test"), PrecisionUnreachable);
}
