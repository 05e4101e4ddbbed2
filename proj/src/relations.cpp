#include "theta_forge/relations.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "theta_forge/errors.hpp"
#include "theta_forge/numeric_core.hpp"
#include "theta_forge/parameters.hpp"
#include "theta_forge/theta.hpp"

namespace theta_forge {

namespace {

constexpr std::pair<ThetaAtom, std::string_view> kAtomNames[] = {
    {ThetaAtom::phi, "phi"},     {ThetaAtom::psi, "psi"},       {ThetaAtom::fneg, "fneg"}, {ThetaAtom::h16, "h16"},
    {ThetaAtom::alpha, "alpha"}, {ThetaAtom::alphac, "alphac"}, {ThetaAtom::z, "z"},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

class RecipeParser {
 public:
  explicit RecipeParser(std::string_view text) : text_(text) {}

  Recipe parse() {
    Recipe recipe;
    bool divide = false;
    for (;;) {
      RecipeFactor factor = parse_factor();
      if (divide) factor.exponent = factor.exponent.negated();
      recipe.factors.push_back(factor);
      if (at_end()) break;
      const char c = text_[pos_];
      if (c != '*' && c != '/') fail("expected '*' or '/'");
      divide = c == '/';
      ++pos_;
    }
    return recipe;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  [[noreturn]] void fail(const std::string& what) const {
    throw UsageError("recipe '" + std::string(text_) + "': " + what + " at offset " + std::to_string(pos_));
  }

  void expect(char c) {
    if (at_end() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::int64_t integer() {
    const size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    if (pos_ - start > 15) fail("integer too large");
    return std::stoll(std::string(text_.substr(start, pos_ - start)));
  }

  // '^' already consumed: k | (a/b) | (-k) | (-a/b)
  RationalExponent exponent(bool allow_negative) {
    if (!at_end() && text_[pos_] == '(') {
      ++pos_;
      bool negative = false;
      if (!at_end() && text_[pos_] == '-') {
        if (!allow_negative) fail("negative exponent not allowed here");
        negative = true;
        ++pos_;
      }
      const std::int64_t num = integer();
      std::int64_t den = 1;
      if (!at_end() && text_[pos_] == '/') {
        ++pos_;
        den = integer();
      }
      expect(')');
      if (num == 0 || den == 0) fail("zero in exponent");
      return RationalExponent::make(negative ? -num : num, den);
    }
    const std::int64_t k = integer();
    if (k == 0) fail("zero exponent");
    return RationalExponent::make(k, 1);
  }

  RationalExponent optional_exponent() {
    if (!at_end() && text_[pos_] == '^') {
      ++pos_;
      return exponent(true);
    }
    return {1, 1};
  }

  RecipeFactor parse_factor() {
    RecipeFactor f;
    if (at_end()) fail("expected factor");
    if (std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      f.kind = RecipeFactor::Kind::constant;
      f.base = integer();
      if (f.base <= 0) fail("constant must be positive");
      f.exponent = optional_exponent();
      return f;
    }
    const size_t start = pos_;
    while (!at_end() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
                         (pos_ > start && std::isdigit(static_cast<unsigned char>(text_[pos_]))))) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "q") {
      f.kind = RecipeFactor::Kind::nome;
      f.exponent = optional_exponent();
      return f;
    }
    const auto* it = std::find_if(std::begin(kAtomNames), std::end(kAtomNames),
                                  [&](const auto& p) { return p.second == name; });
    if (it == std::end(kAtomNames)) {
      pos_ = start;
      fail("unknown atom '" + std::string(name) + "'");
    }
    f.kind = RecipeFactor::Kind::atom;
    f.atom = it->first;
    expect('(');
    if (!at_end() && text_[pos_] == '-') {
      f.negated_arg = true;
      ++pos_;
    }
    expect('q');
    f.arg_power = {1, 1};
    if (!at_end() && text_[pos_] == '^') {
      ++pos_;
      f.arg_power = exponent(false);
    }
    expect(')');
    f.exponent = optional_exponent();
    return f;
  }

  std::string_view text_;
  size_t pos_ = 0;
};

std::string exponent_suffix(const RationalExponent& e) {
  if (e.is_one()) return {};
  if (e.den == 1 && e.num > 0) return "^" + std::to_string(e.num);
  std::string body = std::to_string(e.num);
  if (e.den != 1) body += "/" + std::to_string(e.den);
  return "^(" + body + ")";
}

std::string factor_body(const RecipeFactor& f) {
  switch (f.kind) {
    case RecipeFactor::Kind::constant:
      return std::to_string(f.base);
    case RecipeFactor::Kind::nome:
      return "q";
    case RecipeFactor::Kind::atom: {
      std::string arg = f.negated_arg ? "-q" : "q";
      if (!f.arg_power.is_one()) {
        arg += f.arg_power.den == 1 ? "^" + std::to_string(f.arg_power.num)
                                    : "^(" + std::to_string(f.arg_power.num) + "/" +
                                          std::to_string(f.arg_power.den) + ")";
      }
      return std::string(atom_name(f.atom)) + "(" + arg + ")";
    }
  }
  return {};
}

BigReal power_of(const BigReal& x, const RationalExponent& e) {
  if (e.den == 1) return pow(x, static_cast<long>(e.num));
  return pow_rational(x, e.num, e.den);
}

BigReal eval_atom(ThetaAtom atom, const BigReal& x, const Precision& prec) {
  switch (atom) {
    case ThetaAtom::phi:
      return phi(x, prec);
    case ThetaAtom::psi:
      return psi(x, prec);
    case ThetaAtom::fneg:
      return f_neg(x, prec);
    default:
      break;
  }
  if (x.sign() <= 0) throw DomainError(std::string(atom_name(atom)) + " needs a positive nome");
  switch (atom) {
    case ThetaAtom::h16:
      return h16_product(Nome::raw(x, prec), prec);
    case ThetaAtom::alpha:
      return alpha_of_q(x, prec);
    case ThetaAtom::alphac:
      return modulus_data(x, prec).one_minus_alpha;
    case ThetaAtom::z:
      return z_of_q(x, prec);
    default:
      break;
  }
  throw DomainError("unknown atom");
}


}  // namespace

std::string_view atom_name(ThetaAtom atom) {
  for (const auto& [a, name] : kAtomNames) {
    if (a == atom) return name;
  }
  return "?";
}

RationalExponent RationalExponent::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw UsageError("zero denominator in exponent");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

Recipe Recipe::parse(std::string_view text) {
  if (text.empty()) throw UsageError("empty recipe");
  return RecipeParser(text).parse();
}

std::string Recipe::to_string() const {
  std::string out;
  for (size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    if (i == 0) {
      out += factor_body(f) + exponent_suffix(f.exponent);
    } else if (f.exponent.num > 0) {
      out += "*" + factor_body(f) + exponent_suffix(f.exponent);
    } else {
      out += "/" + factor_body(f) + exponent_suffix(f.exponent.negated());
    }
  }
  return out;
}

BigReal Recipe::eval(const BigReal& q, const BigReal& log_q, const Precision& prec) const {
  const mpfr_prec_t bits = prec.bits();
  BigReal product(1, bits);
  for (const auto& f : factors) {
    switch (f.kind) {
      case RecipeFactor::Kind::constant:
        product *= power_of(BigReal(f.base, bits), f.exponent);
        break;
      case RecipeFactor::Kind::nome:
        product *= exp(log_q * BigReal::from_rational(f.exponent.num, f.exponent.den, bits));
        break;
      case RecipeFactor::Kind::atom: {
        BigReal x = f.arg_power.is_one()
                        ? q
                        : exp(log_q * BigReal::from_rational(f.arg_power.num, f.arg_power.den, bits));
        if (f.negated_arg) x = -x;
        product *= power_of(eval_atom(f.atom, x, prec), f.exponent);
        break;
      }
    }
  }
  return product;
}

Relation parse_relation(std::string_view line) {
  const auto fields = split(line, '|');
  if (fields.size() != 5 && fields.size() != 6) {
    throw UsageError("relation record needs 5 or 6 '|'-separated fields: " + std::string(line));
  }
  Relation rel;
  rel.id = fields[0];
  if (rel.id.empty()) throw UsageError("relation with empty id");
  const std::string where = "relation " + rel.id + ": ";

  std::set<std::string> names;
  for (const auto& tok : split_ws(fields[1])) {
    const auto eq = tok.find('=');
    const auto at = tok.rfind('@');
    if (eq == std::string::npos || at == std::string::npos || at < eq) {
      throw UsageError(where + "variable binding must be name=recipe@power: '" + tok + "'");
    }
    VariableBinding var;
    var.name = tok.substr(0, eq);
    if (var.name.empty() || !std::isalpha(static_cast<unsigned char>(var.name[0])) ||
        !std::all_of(var.name.begin(), var.name.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; })) {
      throw UsageError(where + "bad variable name '" + var.name + "'");
    }
    if (!names.insert(var.name).second) throw UsageError(where + "duplicate variable '" + var.name + "'");
    var.recipe = Recipe::parse(tok.substr(eq + 1, at - eq - 1));
    try {
      var.power = parse_expr(tok.substr(at + 1));
    } catch (const ParseError& err) {
      throw UsageError(where + "q-power: " + err.what());
    }
    rel.variables.push_back(std::move(var));
  }
  if (rel.variables.empty()) throw UsageError(where + "no variables");

  std::set<std::vector<int>> seen;
  for (const auto& tok : split_ws(fields[2])) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw UsageError(where + "term must be exponents:(a,b): '" + tok + "'");
    RelationTerm term;
    for (const auto& e : split(std::string_view(tok).substr(0, colon), ',')) {
      try {
        size_t used = 0;
        const int v = std::stoi(e, &used);
        if (used != e.size()) throw std::invalid_argument(e);
        term.exponents.push_back(v);
      } catch (const std::logic_error&) {
        throw UsageError(where + "bad exponent '" + e + "' in '" + tok + "'");
      }
    }
    if (term.exponents.size() != rel.variables.size()) {
      throw UsageError(where + "term '" + tok + "' has " + std::to_string(term.exponents.size()) +
                       " exponents for " + std::to_string(rel.variables.size()) + " variables");
    }
    term.coeff = ZSqrt2::parse(std::string_view(tok).substr(colon + 1));
    if (term.coeff.is_zero()) continue;
    if (!seen.insert(term.exponents).second) throw UsageError(where + "repeated monomial in '" + tok + "'");
    rel.terms.push_back(std::move(term));
  }
  if (rel.terms.size() < 2) throw UsageError(where + "needs at least two nonzero terms");

  rel.citation = fields[3];
  if (fields[4] == "identity") {
    rel.cls = RelationClass::identity;
  } else if (fields[4] == "suspect") {
    rel.cls = RelationClass::suspect;
  } else {
    throw UsageError(where + "class must be identity or suspect, got '" + fields[4] + "'");
  }
  if (fields.size() == 6) rel.note = fields[5];
  if (rel.cls == RelationClass::suspect && rel.note.empty()) throw UsageError(where + "suspect relation needs a note");
  return rel;
}

std::string serialize_relation(const Relation& rel) {
  std::string out = rel.id + " |";
  for (const auto& v : rel.variables) {
    out += " " + v.name + "=" + v.recipe.to_string() + "@" + print_expr(v.power);
  }
  out += " |";
  for (const auto& t : rel.terms) {
    out += " ";
    for (size_t i = 0; i < t.exponents.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(t.exponents[i]);
    }
    out += ":" + t.coeff.to_string();
  }
  out += " | " + rel.citation + " | " + (rel.cls == RelationClass::identity ? "identity" : "suspect");
  if (!rel.note.empty()) out += " | " + rel.note;
  return out;
}

RelationCatalog RelationCatalog::parse(std::string_view text) {
  RelationCatalog cat;
  std::set<std::string, std::less<>> ids;
  size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') {
      cat.raw_lines_.emplace_back(line);
      cat.line_to_relation_.push_back(-1);
      continue;
    }
    Relation rel = parse_relation(line);
    if (!ids.insert(rel.id).second) throw UsageError("duplicate relation id '" + rel.id + "'");
    cat.raw_lines_.emplace_back();
    cat.line_to_relation_.push_back(static_cast<std::ptrdiff_t>(cat.relations_.size()));
    cat.relations_.push_back(std::move(rel));
  }
  return cat;
}

RelationCatalog RelationCatalog::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open relation catalog '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string RelationCatalog::serialize() const {
  std::string out;
  for (size_t i = 0; i < raw_lines_.size(); ++i) {
    const auto idx = line_to_relation_[i];
    out += idx < 0 ? raw_lines_[i] : serialize_relation(relations_[static_cast<size_t>(idx)]);
    out += '\n';
  }
  return out;
}

const Relation* RelationCatalog::find(std::string_view id) const {
  for (const auto& r : relations_) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

const Relation& RelationCatalog::at(std::string_view id) const {
  if (const auto* r = find(id)) return *r;
  throw UsageError("no relation '" + std::string(id) + "'");
}

std::vector<BigReal> default_relation_samples(mpfr_prec_t bits) {
  std::vector<BigReal> out;
  for (int i = 1; i <= 5; ++i) out.push_back(BigReal::from_rational(i, 10, bits));
  return out;
}

BigReal residual_from_values(const Relation& rel, const std::vector<BigReal>& values, mpfr_prec_t bits) {
  if (values.size() != rel.variables.size()) throw UsageError("relation " + rel.id + ": wrong number of values");
  BigReal sum(0, bits);
  BigReal largest(0, bits);
  for (const auto& t : rel.terms) {
    BigReal term = t.coeff.to_big(bits);
    for (size_t i = 0; i < values.size(); ++i) {
      if (t.exponents[i] != 0) term *= pow(values[i], static_cast<long>(t.exponents[i]));
    }
    const BigReal mag = abs(term);
    if (mag > largest) largest = mag;
    sum += term;
  }
  if (largest.is_zero()) return BigReal(0, bits);
  return abs(sum) / largest;
}

std::vector<BigReal> evaluate_variables(const Relation& rel, const BigReal& q, const Precision& prec) {
  const mpfr_prec_t bits = prec.bits();
  const BigReal q_rounded = q.rounded_to(bits);
  if (!(q_rounded > 0) || !(q_rounded < 1)) throw DomainError("sample nome must lie in (0,1)");
  const BigReal log_q = log(q_rounded);
  std::vector<BigReal> values;
  values.reserve(rel.variables.size());
  for (const auto& var : rel.variables) {
    const BigReal power = eval_expr_bits(var.power, bits);
    if (!(power > 0)) throw DomainError("variable " + var.name + ": q-power must be positive");
    const BigReal log_qs = log_q * power;
    const BigReal qs = exp(log_qs);
    require_nome_in_range(qs, "relation variable");
    values.push_back(var.recipe.eval(qs, log_qs, prec));
  }
  return values;
}

BigReal residual(const Relation& rel, const BigReal& q, const Precision& prec) {
  return residual_from_values(rel, evaluate_variables(rel, q, prec), prec.bits());
}

SampleOutcome relation_sample(const Relation& rel, const BigReal& q, const Precision& prec) {
  try {
    return {residual(rel, q, prec), {}};
  } catch (const std::exception& err) {
    return {BigReal(0, prec.bits()), err.what()};
  }
}

VerificationReport summarize_relation(const Relation& rel, const std::vector<BigReal>& q_list,
                                      const std::vector<SampleOutcome>& outcomes, const Precision& prec,
                                      std::int64_t elapsed_ms) {
  VerificationReport report;
  report.id = rel.id;
  report.kind = ReportKind::relation;
  report.digits = prec.digits;
  report.elapsed_ms = elapsed_ms;

  const mpfr_prec_t bits = prec.bits();
  BigReal worst(0, bits);
  size_t worst_index = 0;
  bool have_value = false;
  std::string errors;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].error.empty()) {
      errors += (errors.empty() ? "" : "; ") + std::string("q=") + q_list[i].to_decimal(6) + ": " + outcomes[i].error;
      continue;
    }
    if (!have_value || outcomes[i].residual > worst) {
      worst = outcomes[i].residual;
      worst_index = i;
      have_value = true;
    }
  }
  const size_t evaluated = outcomes.size() - static_cast<size_t>(std::count_if(
                                                 outcomes.begin(), outcomes.end(),
                                                 [](const SampleOutcome& o) { return !o.error.empty(); }));
  const BigReal threshold = pass_threshold(prec.digits, kRelationSlack, bits);
  const bool holds = evaluated > 0 && worst < threshold;
  const std::string threshold_text = "threshold 1e-" + std::to_string(prec.digits - kRelationSlack);

  report.residual = evaluated > 0 ? format_residual(worst) : "nan";
  std::string where;
  if (evaluated > 0) {
    where = "max over " + std::to_string(evaluated) + " nomes at q=" + q_list[worst_index].to_decimal(6);
  }
  if (rel.cls == RelationClass::suspect) {
    report.status = ReportStatus::suspect;
    report.note = std::string(holds ? "printed relation holds" : "printed relation fails") + " (" + threshold_text +
                  "); " + where + "; " + rel.note;
  } else if (!errors.empty() && evaluated == 0) {
    report.status = ReportStatus::error;
    report.note = errors;
  } else if (!errors.empty()) {
    report.status = ReportStatus::error;
    report.note = where + "; " + errors;
  } else {
    report.status = holds ? ReportStatus::pass : ReportStatus::fail;
    report.note = threshold_text + "; " + where;
  }
  if (!errors.empty() && rel.cls == RelationClass::suspect) report.note += "; " + errors;
  return report;
}

VerificationReport verify_relation(const Relation& rel, const std::vector<BigReal>& q_list, const Precision& prec) {
  if (q_list.empty()) throw UsageError("verify_relation needs at least one sample nome");
  const auto started = std::chrono::steady_clock::now();
  std::vector<SampleOutcome> outcomes;
  outcomes.reserve(q_list.size());
  for (const auto& q : q_list) outcomes.push_back(relation_sample(rel, q, prec));
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
  return summarize_relation(rel, q_list, outcomes, prec, elapsed);
}

VerificationReport verify_relation(const RelationCatalog& catalog, std::string_view id,
                                   const std::vector<BigReal>& q_list, const Precision& prec) {
  return verify_relation(catalog.at(id), q_list, prec);
}

}  // namespace theta_forge
