#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "test_support.hpp"
#include "theta_forge/errors.hpp"
#include "theta_forge/relations.hpp"
#include "theta_forge/theta.hpp"

using namespace theta_forge;
using test_support::rel_diff;
using test_support::tiny;

namespace {

const std::string kCatalogPath = THETA_FORGE_DEFAULT_CATALOG_DIR "/relations.catalog";

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("Z[sqrt2] arithmetic") {
  const ZSqrt2 x{3, 2};
  const ZSqrt2 y{1, -1};
  CHECK(x * y == ZSqrt2{-1, -1});
  CHECK(x.norm() == 1);
  CHECK(x.conjugate() == ZSqrt2{3, -2});
  CHECK((x + y) == ZSqrt2{4, 1});
  CHECK((x - y) == ZSqrt2{2, 3});
  CHECK(ZSqrt2{-7, 3}.height() == 7);
  CHECK(ZSqrt2::parse("(-4,5)") == ZSqrt2{-4, 5});
  CHECK(ZSqrt2::parse(ZSqrt2{12, -9}.to_string()) == ZSqrt2{12, -9});
  CHECK_THROWS_AS(ZSqrt2::parse("(1;2)"), UsageError);
  CHECK(ZSqrt2{1, 1}.to_double() == doctest::Approx(2.41421356237));
}

TEST_CASE("units, exact division and gcd") {
  for (int k = -6; k <= 6; ++k) {
    CAPTURE(k);
    CHECK(unit_power(k) * unit_power(-k) == ZSqrt2{1, 0});
    CHECK(std::abs(unit_power(k).norm()) == 1);
  }
  CHECK(unit_power(2) == ZSqrt2{3, 2});
  const ZSqrt2 p{1, 1};
  const ZSqrt2 q{5, 3};
  CHECK(divide_exact(p * q, q) == p);
  CHECK_THROWS_AS(divide_exact(ZSqrt2{3, 0}, ZSqrt2{2, 0}), InconsistencyError);
  const ZSqrt2 g = gcd(ZSqrt2{4, 2} * q, ZSqrt2{6, 0} * q);
  // gcd is defined up to a unit; its norm is fixed.
  CHECK(std::abs(g.norm()) == std::abs((ZSqrt2{2, 0} * q).norm()));
  CHECK(divide_exact(ZSqrt2{4, 2} * q, g).norm() != 0);
  const ZSqrt2 r = divide_nearest(ZSqrt2{7, 1}, ZSqrt2{2, 0});
  CHECK((ZSqrt2{7, 1} - r * ZSqrt2{2, 0}).norm() != 0);
}

TEST_CASE("recipe grammar round trip") {
  for (const char* text : {"phi(-q)/q/psi(q^8)", "phi(q)/q^(1/2)/psi(q^4)", "h16(q)", "2^(3/2)*fneg(-q^3)^(-2)",
                           "alpha(q^(1/3))*alphac(q)^(1/8)", "z(q)/z(q^3)", "1"}) {
    CAPTURE(text);
    const Recipe r = Recipe::parse(text);
    CHECK(Recipe::parse(r.to_string()) == r);
  }
  CHECK_THROWS_AS(Recipe::parse("phi(-q"), UsageError);
  CHECK_THROWS_AS(Recipe::parse("nosuch(q)"), UsageError);
  CHECK_THROWS_AS(Recipe::parse("phi(x)"), UsageError);
  CHECK_THROWS_AS(Recipe::parse(""), UsageError);
}

TEST_CASE("recipes evaluate to their theta quotients") {
  const Precision prec(50);
  const mpfr_prec_t bits = prec.bits();
  const BigReal q = BigReal::from_string("0.3", bits);
  const BigReal lq = log(q);
  const BigReal expect = phi(-q, prec) / (q * psi(pow(q, 8L), prec));
  CHECK(rel_diff(Recipe::parse("phi(-q)/q/psi(q^8)").eval(q, lq, prec), expect) < tiny(48));
  const BigReal expect2 = sqrt(BigReal(2, bits)) * pow(f_neg(pow(q, 3L), prec), -2L);
  CHECK(rel_diff(Recipe::parse("2^(1/2)*fneg(q^3)^(-2)").eval(q, lq, prec), expect2) < tiny(48));
  CHECK(rel_diff(Recipe::parse("z(q)").eval(q, lq, prec), z_of_q(q, prec)) < tiny(48));
  CHECK_THROWS_AS(Recipe::parse("alpha(-q)").eval(q, lq, prec), DomainError);
}

TEST_CASE("relation records") {
  const std::string line =
      "eq39 | P=phi(-q)/q/psi(q^8)@1 R=phi(q)/q/psi(q^8)@1 | 1,0:(-1,0) 0,1:(1,0) 0,0:(-4,0) | R=P+4 | identity";
  const Relation rel = parse_relation(line);
  CHECK(rel.id == "eq39");
  CHECK(rel.variables.size() == 2);
  CHECK(rel.terms.size() == 3);
  CHECK(serialize_relation(rel) == line);
  CHECK(parse_relation(serialize_relation(rel)) == rel);

  CHECK_THROWS_AS(parse_relation("x | P=phi(q)@1 | 1:(1,0) | c | identity"), UsageError);
  CHECK_THROWS_AS(parse_relation("x | P=phi(q)@1 | 1:(1,0) 1:(2,0) | c | identity"), UsageError);
  CHECK_THROWS_AS(parse_relation("x | P=phi(q)@1 P=psi(q)@1 | 1,0:(1,0) 0,1:(1,0) | c | identity"), UsageError);
  CHECK_THROWS_AS(parse_relation("x | P=phi(q)@1 | 1:(1,0) 0:(1,0) | c | suspect"), UsageError);
  CHECK_THROWS_AS(parse_relation("x | P=phi(q)@1 | 1,1:(1,0) 0:(1,0) | c | identity"), UsageError);
  CHECK_THROWS_AS(parse_relation("x | P=phi(q)@1 | 1:(1,0) 0:(1,0) | c | maybe"), UsageError);
  CHECK_NOTHROW(parse_relation("x | P=phi(q)@2*sqrt(2) | 1:(1,0) 0:(1,0) | c | suspect | irrational nome power"));
}

TEST_CASE("shipped relation catalog round-trips bit-exact") {
  const std::string text = read_text(kCatalogPath);
  REQUIRE_FALSE(text.empty());
  const RelationCatalog catalog = RelationCatalog::parse(text);
  CHECK(catalog.serialize() == text);
  CHECK(catalog.entries().size() >= 45);
  CHECK(catalog.find("eq39") != nullptr);
  CHECK(catalog.find("nosuch") == nullptr);
  CHECK_THROWS_AS(catalog.at("nosuch"), UsageError);
}

TEST_CASE("identities pass and printed forms are flagged") {
  const Precision prec(50);
  const RelationCatalog catalog = RelationCatalog::load(kCatalogPath);
  const auto samples = default_relation_samples(prec.bits());
  REQUIRE(samples.size() == 5);
  for (const auto& rel : catalog.entries()) {
    CAPTURE(rel.id);
    const auto report = verify_relation(rel, samples, prec);
    CHECK(report.kind == ReportKind::relation);
    if (rel.cls == RelationClass::identity) {
      CHECK(report.status == ReportStatus::pass);
      CHECK(parse_residual(report.residual).to_double() < tiny(40));
    } else {
      CHECK(report.status == ReportStatus::suspect);
      CHECK(report.note.find("printed relation fails") != std::string::npos);
    }
  }
}

TEST_CASE("more digits shrink the residual") {
  const RelationCatalog catalog = RelationCatalog::load(kCatalogPath);
  for (const char* id : {"eq39", "deg5_AB", "h16_deg5", "gtrms_iv"}) {
    CAPTURE(id);
    const auto lo = verify_relation(catalog, id, default_relation_samples(Precision(50).bits()), Precision(50));
    const auto hi = verify_relation(catalog, id, default_relation_samples(Precision(80).bits()), Precision(80));
    CHECK(parse_residual(hi.residual) <= parse_residual(lo.residual));
    CHECK(parse_residual(hi.residual).to_double() < tiny(70));
  }
}

TEST_CASE("a false relation fails and a bad nome is an error") {
  const Precision prec(40);
  const Relation wrong = parse_relation(
      "wrong | P=phi(-q)/q/psi(q^8)@1 R=phi(q)/q/psi(q^8)@1 | 1,0:(-1,0) 0,1:(1,0) 0,0:(-5,0) | R=P+5 | identity");
  CHECK(verify_relation(wrong, default_relation_samples(prec.bits()), prec).status == ReportStatus::fail);
  const std::vector<BigReal> bad{BigReal::from_string("0.2", prec.bits()), BigReal::from_string("0.9999", prec.bits())};
  const auto report = verify_relation(wrong, bad, prec);
  CHECK(report.status == ReportStatus::error);
  CHECK(residual(wrong, BigReal::from_string("0.2", prec.bits()), prec).to_double() > 1e-3);
  CHECK_THROWS_AS(evaluate_variables(wrong, BigReal::from_string("1.2", prec.bits()), prec), DomainError);
}

TEST_CASE("randomized relation records round trip") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coeff(-50, 50);
  std::uniform_int_distribution<int> expo(-4, 4);
  for (int trial = 0; trial < 50; ++trial) {
    Relation rel;
    rel.id = "r" + std::to_string(trial);
    rel.variables = parse_relation("x | P=phi(-q)/q/psi(q^8)@1 R=psi(q^3)^(1/2)@2*sqrt(2) | 1,0:(1,0) 0,1:(1,0) | c "
                                   "| identity")
                        .variables;
    std::set<std::vector<int>> used;
    while (rel.terms.size() < 4) {
      std::vector<int> e{expo(rng), expo(rng)};
      ZSqrt2 c{coeff(rng), coeff(rng)};
      if (c.is_zero() || !used.insert(e).second) continue;
      rel.terms.push_back({e, c});
    }
    rel.citation = "random";
    CHECK(parse_relation(serialize_relation(rel)) == rel);
  }
}
