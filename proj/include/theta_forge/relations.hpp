#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "theta_forge/big_real.hpp"
#include "theta_forge/radical_expr.hpp"
#include "theta_forge/report.hpp"
#include "theta_forge/zsqrt2.hpp"

namespace theta_forge {

enum class ThetaAtom { phi, psi, fneg, h16, alpha, alphac, z };

std::string_view atom_name(ThetaAtom atom);

/// Signed rational exponent in lowest terms, den > 0.
struct RationalExponent {
  std::int64_t num = 1;
  std::int64_t den = 1;

  static RationalExponent make(std::int64_t num, std::int64_t den);
  bool is_one() const { return num == 1 && den == 1; }
  RationalExponent negated() const { return {-num, den}; }
  friend bool operator==(const RationalExponent&, const RationalExponent&) = default;
};

/// One factor of a recipe: theta-type atom at +-q^a, a bare power of q, or an integer constant.
struct RecipeFactor {
  enum class Kind { atom, nome, constant };

  Kind kind = Kind::atom;
  ThetaAtom atom = ThetaAtom::phi;
  bool negated_arg = false;
  RationalExponent arg_power;  // atom argument is (+-)q^arg_power
  std::int64_t base = 1;       // constant factors only
  RationalExponent exponent;

  friend bool operator==(const RecipeFactor&, const RecipeFactor&) = default;
};

/// Product of factors such as "phi(-q)/q/psi(q^8)". A '/' before a factor negates its exponent.
struct Recipe {
  std::vector<RecipeFactor> factors;

  static Recipe parse(std::string_view text);
  std::string to_string() const;
  /// Evaluates at nome q (0 < q < 1) whose logarithm is log_q.
  BigReal eval(const BigReal& q, const BigReal& log_q, const Precision& prec) const;

  friend bool operator==(const Recipe&, const Recipe&) = default;
};

/// Variable bound to a recipe evaluated at q^power, where q is the sample nome.
struct VariableBinding {
  std::string name;
  Recipe recipe;
  RadicalExpr power;

  friend bool operator==(const VariableBinding&, const VariableBinding&) = default;
};

struct RelationTerm {
  std::vector<int> exponents;
  ZSqrt2 coeff;

  friend bool operator==(const RelationTerm&, const RelationTerm&) = default;
};

enum class RelationClass { identity, suspect };

/// Laurent polynomial over Z[sqrt2] in bound variables, stored as LHS - RHS.
struct Relation {
  std::string id;
  std::vector<VariableBinding> variables;
  std::vector<RelationTerm> terms;
  std::string citation;
  RelationClass cls = RelationClass::identity;
  std::string note;

  friend bool operator==(const Relation&, const Relation&) = default;
};

/// id | var=recipe@power ... | e1,e2:(a,b) ... | citation | class [| note]
Relation parse_relation(std::string_view line);
std::string serialize_relation(const Relation& rel);

class RelationCatalog {
 public:
  static RelationCatalog parse(std::string_view text);
  static RelationCatalog load(const std::string& path);

  std::string serialize() const;
  const std::vector<Relation>& entries() const { return relations_; }
  const Relation* find(std::string_view id) const;
  const Relation& at(std::string_view id) const;

 private:
  std::vector<Relation> relations_;
  std::vector<std::string> raw_lines_;  // comment lines verbatim; empty marker for relations
  std::vector<std::ptrdiff_t> line_to_relation_;
};

inline constexpr int kRelationSlack = 10;

/// Default sample nomes 0.1, 0.2, 0.3, 0.4, 0.5.
std::vector<BigReal> default_relation_samples(mpfr_prec_t bits);

/// |sum of terms| / max |term| from already evaluated variable values.
BigReal residual_from_values(const Relation& rel, const std::vector<BigReal>& values, mpfr_prec_t bits);

std::vector<BigReal> evaluate_variables(const Relation& rel, const BigReal& q, const Precision& prec);

BigReal residual(const Relation& rel, const BigReal& q, const Precision& prec);

struct SampleOutcome {
  BigReal residual;
  std::string error;  // empty when the sample evaluated
};

SampleOutcome relation_sample(const Relation& rel, const BigReal& q, const Precision& prec);

VerificationReport summarize_relation(const Relation& rel, const std::vector<BigReal>& q_list,
                                      const std::vector<SampleOutcome>& outcomes, const Precision& prec,
                                      std::int64_t elapsed_ms);

VerificationReport verify_relation(const Relation& rel, const std::vector<BigReal>& q_list, const Precision& prec);
VerificationReport verify_relation(const RelationCatalog& catalog, std::string_view id,
                                   const std::vector<BigReal>& q_list, const Precision& prec);

}  // namespace theta_forge
