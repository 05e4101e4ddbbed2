#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "theta_forge/big_real.hpp"

namespace theta_forge {

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct IntLit {
  std::int64_t value;
};

/// num/den in lowest terms with den >= 2.
struct RatLit {
  std::int64_t num;
  std::int64_t den;
};

enum class BinaryOp { add, sub, mul, div };

struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

/// base^(num/den); sqrt(x) is Pow(x, 1/2), root(n, x) is Pow(x, 1/n).
struct Pow {
  ExprPtr base;
  std::int64_t num;
  std::int64_t den;
};

struct ExprNode {
  std::variant<IntLit, RatLit, Binary, Pow> value;
};

/// Immutable closed-form expression tree built from integers, rationals, the
/// four operations and rational powers.
class RadicalExpr {
 public:
  RadicalExpr() : RadicalExpr(integer(0)) {}

  static RadicalExpr integer(std::int64_t v);
  static RadicalExpr rational(std::int64_t num, std::int64_t den);
  static RadicalExpr binary(BinaryOp op, RadicalExpr lhs, RadicalExpr rhs);
  static RadicalExpr power(RadicalExpr base, std::int64_t num, std::int64_t den);

  const ExprNode& node() const { return *node_; }
  const ExprPtr& ptr() const { return node_; }

  friend RadicalExpr operator+(RadicalExpr a, RadicalExpr b) { return binary(BinaryOp::add, std::move(a), std::move(b)); }
  friend RadicalExpr operator-(RadicalExpr a, RadicalExpr b) { return binary(BinaryOp::sub, std::move(a), std::move(b)); }
  friend RadicalExpr operator*(RadicalExpr a, RadicalExpr b) { return binary(BinaryOp::mul, std::move(a), std::move(b)); }
  friend RadicalExpr operator/(RadicalExpr a, RadicalExpr b) { return binary(BinaryOp::div, std::move(a), std::move(b)); }

  /// Structural equality.
  friend bool operator==(const RadicalExpr& a, const RadicalExpr& b);

 private:
  explicit RadicalExpr(ExprPtr node) : node_(std::move(node)) {}

  ExprPtr node_;
};

RadicalExpr sqrt_expr(RadicalExpr x);
RadicalExpr root_expr(std::int64_t n, RadicalExpr x);

/// Grammar: integers, a/b, + - * /, unary minus, sqrt(x), root(n, x),
/// x^k and x^(a/b), parentheses. Throws ParseError with a byte offset.
RadicalExpr parse_expr(std::string_view text);

/// Canonical text; parse_expr(print_expr(e)) == e.
std::string print_expr(const RadicalExpr& expr);

/// Evaluates at the given binary precision without any stability check.
BigReal eval_expr_bits(const RadicalExpr& expr, mpfr_prec_t bits);

/// Evaluates at the working precision and again 20 digits higher; throws
/// PrecisionUnreachable when the two disagree beyond 10^-digits.
BigReal eval_expr(const RadicalExpr& expr, const Precision& prec);

}  // namespace theta_forge
