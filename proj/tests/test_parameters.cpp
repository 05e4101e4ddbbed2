#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "test_support.hpp"
#include "theta_forge/errors.hpp"
#include "theta_forge/parameters.hpp"

using namespace theta_forge;
using test_support::oracle;
using test_support::oracles;
using test_support::rel_diff;
using test_support::tiny;

namespace {

ParamSpec spec(const std::string& text) { return ParamSpec::parse(text); }

}  // namespace

TEST_CASE("every family matches the reference values") {
  const Precision prec(50);
  const mpfr_prec_t bits = prec.bits();
  for (const auto& row : oracles()["params"]) {
    const std::string text =
        row["family"].get<std::string>() + " " + row["k"].get<std::string>() + " " + row["n"].get<std::string>();
    CAPTURE(text);
    CHECK(rel_diff(eval_param(spec(text), prec), oracle(row["value"], bits)) < tiny(47));
  }
}

TEST_CASE("spec parsing and printing") {
  const ParamSpec s = spec("A_prime 1/2 3");
  CHECK(s.family == Family::A_prime);
  CHECK(s.k == PositiveRational(1, 2));
  CHECK(s.n == PositiveRational(3));
  CHECK(ParamSpec::parse(s.to_string()) == s);
  CHECK(PositiveRational::parse("6/4") == PositiveRational(3, 2));
  CHECK_THROWS_AS(spec("A 4"), UsageError);
  CHECK_THROWS_AS(spec("B 4 1"), UsageError);
  CHECK_THROWS_AS(spec("A 4 -1"), UsageError);
  CHECK_THROWS_AS(spec("A 0 1"), UsageError);
  CHECK_THROWS_AS(spec("A 4 1/0"), UsageError);
}

TEST_CASE("nome conventions") {
  const Precision prec(40);
  const mpfr_prec_t bits = prec.bits();
  const BigReal e_pi = exp(-pi(bits));
  CHECK(rel_diff(nome_for(spec("A 4 4"), prec).value(), e_pi) < tiny(38));
  CHECK(rel_diff(nome_for(spec("h16 1 1"), prec).value(), e_pi) < tiny(38));
  CHECK(rel_diff(nome_for(spec("r 2 2"), prec).value(), e_pi * e_pi) < tiny(38));
  CHECK(rel_diff(nome_for(spec("h_prime 1 1"), prec).value(), e_pi * e_pi) < tiny(38));
  const Nome q = nome_for(spec("A 4 1"), prec);
  CHECK(rel_diff(q.power(PositiveRational(2)).value(), q.value() * q.value()) < tiny(38));
  CHECK_THROWS_AS(Nome::raw(BigReal::from_string("1.5", bits), prec), DomainError);
}

TEST_CASE("anchor values") {
  const Precision prec(50);
  const mpfr_prec_t bits = prec.bits();
  CHECK(rel_diff(eval_param(spec("A 4 1"), prec), BigReal(1, bits)) < tiny(48));
  CHECK(rel_diff(eval_param(spec("A 1/2 1"), prec), BigReal(1, bits)) < tiny(48));
  CHECK(rel_diff(eval_param(spec("r 2 2"), prec), root(BigReal(2, bits), 8)) < tiny(48));
  CHECK(rel_diff(eval_param(spec("A_prime 4 1"), prec), 1 + sqrt(BigReal(2, bits))) < tiny(48));
}

TEST_CASE("A and A' duality across k and n") {
  const Precision prec(50);
  for (const char* k : {"4", "2", "1", "1/2", "3"}) {
    for (const char* n : {"1", "2", "3/5", "7"}) {
      CAPTURE(k);
      CAPTURE(n);
      const auto [a, b] = duality_A(PositiveRational::parse(k), PositiveRational::parse(n), prec);
      CHECK(rel_diff(a * b, BigReal(1, prec.bits())) < tiny(47));
    }
  }
}

TEST_CASE("r-family products reproduce A_{1/2,n} and A'_{k/2,n}") {
  const Precision prec(50);
  for (int n = 1; n <= 6; ++n) {
    const PositiveRational nn(n);
    CAPTURE(n);
    CHECK(rel_diff(a_half_from_r(nn, prec), eval_param(ParamSpec{Family::A, PositiveRational(1, 2), nn}, prec)) <
          tiny(47));
  }
  for (int k : {2, 3, 4, 8}) {
    for (const char* n : {"1", "2", "1/3"}) {
      CAPTURE(k);
      CAPTURE(n);
      const PositiveRational kk(k);
      const PositiveRational nn = PositiveRational::parse(n);
      const BigReal direct = eval_param(ParamSpec{Family::A_prime, PositiveRational(k, 2), nn}, prec);
      CHECK(rel_diff(a_prime_from_r(kk, nn, prec), direct) < tiny(47));
    }
  }
  const BigReal direct = eval_param(spec("A_prime 1 1"), prec);
  CHECK(rel_diff(a_prime_from_r_as_printed(PositiveRational(2), PositiveRational(1), prec), direct) > 1e-2);
}

TEST_CASE("h16 series and product agree and tie to A_{4,n}") {
  const Precision prec(50);
  const mpfr_prec_t bits = prec.bits();
  for (const char* n : {"1", "2", "3", "1/2", "9"}) {
    CAPTURE(n);
    const ParamSpec a{Family::A, PositiveRational(4), PositiveRational::parse(n)};
    const Nome q = nome_for(a, prec);
    CHECK(rel_diff(h16(q, prec), h16_product(q, prec)) < tiny(47));
    CHECK(rel_diff(sqrt(BigReal(8, bits)) * h16(q, prec) * eval_param(a, prec), BigReal(1, bits)) < tiny(47));
  }
}

TEST_CASE("digits requested are delivered") {
  const ParamSpec s = spec("A 4 3");
  const BigReal at50 = eval_param(s, Precision(50));
  const BigReal at90 = eval_param(s, Precision(90));
  CHECK(rel_diff(at50, at90) < tiny(50));
}

TEST_CASE("randomized index pairs keep duality and the A' shift") {
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<int> num(1, 40);
  std::uniform_int_distribution<int> den(1, 12);
  const Precision prec(40);
  const mpfr_prec_t bits = prec.bits();
  for (int trial = 0; trial < 25; ++trial) {
    const PositiveRational n(num(rng), den(rng));
    CAPTURE(n.to_string());
    const auto [a, b] = duality_A(PositiveRational(4), n, prec);
    CHECK(test_support::rel_diff(a * b, BigReal(1, bits)) < tiny(37));
    const BigReal ap = eval_param(ParamSpec{Family::A_prime, PositiveRational(4), n}, prec);
    CHECK(test_support::rel_diff(ap, a + sqrt(BigReal(2, bits))) < tiny(37));
  }
}
