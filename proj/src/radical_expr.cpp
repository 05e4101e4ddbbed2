#include "theta_forge/radical_expr.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <numeric>
#include <vector>

#include "theta_forge/errors.hpp"

namespace theta_forge {

RadicalExpr RadicalExpr::integer(std::int64_t v) {
  return RadicalExpr(std::make_shared<const ExprNode>(ExprNode{IntLit{v}}));
}

RadicalExpr RadicalExpr::rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("rational literal with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (den == 1) return integer(num);
  return RadicalExpr(std::make_shared<const ExprNode>(ExprNode{RatLit{num, den}}));
}

RadicalExpr RadicalExpr::binary(BinaryOp op, RadicalExpr lhs, RadicalExpr rhs) {
  return RadicalExpr(std::make_shared<const ExprNode>(ExprNode{Binary{op, lhs.node_, rhs.node_}}));
}

RadicalExpr RadicalExpr::power(RadicalExpr base, std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("exponent with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return RadicalExpr(std::make_shared<const ExprNode>(ExprNode{Pow{base.node_, num, den}}));
}

RadicalExpr sqrt_expr(RadicalExpr x) { return RadicalExpr::power(std::move(x), 1, 2); }

RadicalExpr root_expr(std::int64_t n, RadicalExpr x) {
  if (n < 1) throw DomainError("root index must be positive");
  return RadicalExpr::power(std::move(x), 1, n);
}

namespace {

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
  if (a.value.index() != b.value.index()) return false;
  return std::visit(
      [&b](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.value);
        if constexpr (std::is_same_v<T, IntLit>) {
          return lhs.value == rhs.value;
        } else if constexpr (std::is_same_v<T, RatLit>) {
          return lhs.num == rhs.num && lhs.den == rhs.den;
        } else if constexpr (std::is_same_v<T, Binary>) {
          return lhs.op == rhs.op && nodes_equal(*lhs.lhs, *rhs.lhs) && nodes_equal(*lhs.rhs, *rhs.rhs);
        } else {
          return lhs.num == rhs.num && lhs.den == rhs.den && nodes_equal(*lhs.base, *rhs.base);
        }
      },
      a.value);
}

}  // namespace

bool operator==(const RadicalExpr& a, const RadicalExpr& b) { return nodes_equal(a.node(), b.node()); }

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  RadicalExpr parse() {
    skip_space();
    if (at_end()) throw ParseError("empty expression", pos_);
    RadicalExpr e = expression();
    skip_space();
    if (!at_end()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_space();
    return at_end() ? '\0' : text_[pos_];
  }

  [[noreturn]] void fail(const std::string& what) {
    // Running off the end inside a group points at the group that never closed.
    if (at_end() && !open_groups_.empty()) {
      throw ParseError(what + " (unclosed '(')", open_groups_.back());
    }
    throw ParseError(what, pos_);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void open_group() {
    expect('(');
    open_groups_.push_back(pos_ - 1);
  }

  void close_group() {
    expect(')');
    open_groups_.pop_back();
  }

  std::int64_t integer_literal() {
    skip_space();
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{}) throw ParseError("integer literal out of range", start);
    (void)ptr;
    return value;
  }

  RadicalExpr expression() {
    RadicalExpr lhs = term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      RadicalExpr rhs = term();
      lhs = RadicalExpr::binary(c == '+' ? BinaryOp::add : BinaryOp::sub, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  RadicalExpr term() {
    RadicalExpr lhs = unary();
    for (char c = peek(); c == '*' || c == '/'; c = peek()) {
      ++pos_;
      RadicalExpr rhs = unary();
      if (c == '/') {
        const auto* n = std::get_if<IntLit>(&lhs.node().value);
        const auto* d = std::get_if<IntLit>(&rhs.node().value);
        // Literal a/b already in lowest terms is a rational literal.
        if (n && d && d->value > 1 && std::gcd(n->value, d->value) == 1) {
          lhs = RadicalExpr::rational(n->value, d->value);
          continue;
        }
      }
      lhs = RadicalExpr::binary(c == '*' ? BinaryOp::mul : BinaryOp::div, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  RadicalExpr unary() {
    if (peek() == '-') {
      ++pos_;
      RadicalExpr inner = unary();
      if (const auto* i = std::get_if<IntLit>(&inner.node().value)) return RadicalExpr::integer(-i->value);
      if (const auto* r = std::get_if<RatLit>(&inner.node().value)) return RadicalExpr::rational(-r->num, r->den);
      return RadicalExpr::integer(-1) * std::move(inner);
    }
    return power();
  }

  RadicalExpr power() {
    RadicalExpr base = primary();
    if (peek() != '^') return base;
    ++pos_;
    std::int64_t num = 0;
    std::int64_t den = 1;
    if (peek() == '(') {
      open_group();
      bool negative = false;
      if (peek() == '-') {
        ++pos_;
        negative = true;
      }
      num = integer_literal();
      if (peek() == '/') {
        ++pos_;
        den = integer_literal();
        if (den == 0) fail("zero exponent denominator");
      }
      close_group();
      if (negative) num = -num;
    } else {
      num = integer_literal();
    }
    return RadicalExpr::power(std::move(base), num, den);
  }

  RadicalExpr primary() {
    const char c = peek();
    if (c == '(') {
      open_group();
      RadicalExpr inner = expression();
      close_group();
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return RadicalExpr::integer(integer_literal());
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (!at_end() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "sqrt") {
        open_group();
        RadicalExpr arg = expression();
        close_group();
        return sqrt_expr(std::move(arg));
      }
      if (name == "root") {
        open_group();
        const std::int64_t n = integer_literal();
        if (n < 1) fail("root index must be positive");
        expect(',');
        RadicalExpr arg = expression();
        close_group();
        return root_expr(n, std::move(arg));
      }
      throw ParseError("unknown function '" + std::string(name) + "'", start);
    }
    if (at_end()) fail("unexpected end of expression");
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<std::size_t> open_groups_;
};

}  // namespace

RadicalExpr parse_expr(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace {

enum class Slot { top, add_lhs, add_rhs, sub_rhs, mul_lhs, mul_rhs, div_lhs, div_rhs, pow_base };

bool is_sugar(const Pow& p) { return p.num == 1 && p.den >= 2; }

bool needs_parens(const ExprNode& node, Slot slot) {
  return std::visit(
      [slot](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return slot == Slot::pow_base && n.value < 0;
        } else if constexpr (std::is_same_v<T, RatLit>) {
          return slot == Slot::pow_base || slot == Slot::mul_rhs || slot == Slot::div_rhs;
        } else if constexpr (std::is_same_v<T, Binary>) {
          const bool additive = n.op == BinaryOp::add || n.op == BinaryOp::sub;
          switch (slot) {
            case Slot::top:
            case Slot::add_lhs:
              return false;
            case Slot::add_rhs:
            case Slot::sub_rhs:
              return additive;
            case Slot::mul_lhs:
            case Slot::div_lhs:
              return additive;
            case Slot::mul_rhs:
            case Slot::div_rhs:
              return true;
            case Slot::pow_base:
              return true;
          }
          return true;
        } else {
          return slot == Slot::pow_base && !is_sugar(n);
        }
      },
      node.value);
}

void print_node(const ExprNode& node, Slot slot, std::string& out);

void print_child(const ExprPtr& child, Slot slot, std::string& out) {
  const bool parens = needs_parens(*child, slot);
  if (parens) out += '(';
  print_node(*child, parens ? Slot::top : slot, out);
  if (parens) out += ')';
}

void print_node(const ExprNode& node, Slot, std::string& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          out += std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, RatLit>) {
          out += std::to_string(n.num) + "/" + std::to_string(n.den);
        } else if constexpr (std::is_same_v<T, Binary>) {
          switch (n.op) {
            case BinaryOp::add:
              print_child(n.lhs, Slot::add_lhs, out);
              out += '+';
              print_child(n.rhs, Slot::add_rhs, out);
              break;
            case BinaryOp::sub:
              print_child(n.lhs, Slot::add_lhs, out);
              out += '-';
              print_child(n.rhs, Slot::sub_rhs, out);
              break;
            case BinaryOp::mul:
              print_child(n.lhs, Slot::mul_lhs, out);
              out += '*';
              print_child(n.rhs, Slot::mul_rhs, out);
              break;
            case BinaryOp::div:
              print_child(n.lhs, Slot::div_lhs, out);
              out += '/';
              print_child(n.rhs, Slot::div_rhs, out);
              break;
          }
        } else {
          if (n.num == 1 && n.den == 2) {
            out += "sqrt(";
            print_node(*n.base, Slot::top, out);
            out += ')';
          } else if (n.num == 1 && n.den > 2) {
            out += "root(" + std::to_string(n.den) + ",";
            print_node(*n.base, Slot::top, out);
            out += ')';
          } else {
            print_child(n.base, Slot::pow_base, out);
            if (n.den == 1 && n.num >= 0) {
              out += "^" + std::to_string(n.num);
            } else if (n.den == 1) {
              out += "^(" + std::to_string(n.num) + ")";
            } else {
              out += "^(" + std::to_string(n.num) + "/" + std::to_string(n.den) + ")";
            }
          }
        }
      },
      node.value);
}

}  // namespace

std::string print_expr(const RadicalExpr& expr) {
  std::string out;
  print_node(expr.node(), Slot::top, out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

BigReal eval_node(const ExprNode& node, mpfr_prec_t bits) {
  return std::visit(
      [bits](const auto& n) -> BigReal {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return BigReal::from_rational(n.value, 1, bits);
        } else if constexpr (std::is_same_v<T, RatLit>) {
          return BigReal::from_rational(n.num, n.den, bits);
        } else if constexpr (std::is_same_v<T, Binary>) {
          BigReal lhs = eval_node(*n.lhs, bits);
          const BigReal rhs = eval_node(*n.rhs, bits);
          switch (n.op) {
            case BinaryOp::add:
              return lhs += rhs;
            case BinaryOp::sub:
              return lhs -= rhs;
            case BinaryOp::mul:
              return lhs *= rhs;
            case BinaryOp::div:
              return lhs /= rhs;
          }
          throw DomainError("unknown operator");
        } else {
          const BigReal base = eval_node(*n.base, bits);
          if (base.is_zero() && n.num < 0) throw DomainError("negative power of zero");
          return pow_rational(base, n.num, n.den);
        }
      },
      node.value);
}

}  // namespace

BigReal eval_expr_bits(const RadicalExpr& expr, mpfr_prec_t bits) { return eval_node(expr.node(), bits); }

BigReal eval_expr(const RadicalExpr& expr, const Precision& prec) {
  const mpfr_prec_t bits = prec.bits();
  const BigReal working = eval_expr_bits(expr, bits);
  const BigReal reference = eval_expr_bits(expr, prec.with_extra_digits(20).bits());
  const BigReal diff = relative_difference(working, reference);
  if (diff > ten_to_minus(prec.digits, bits)) {
    throw PrecisionUnreachable("closed form is unstable at " + std::to_string(prec.digits) +
                               " digits (relative drift " + diff.to_scientific(4) + ")");
  }
  return reference.rounded_to(bits);
}

}  // namespace theta_forge
