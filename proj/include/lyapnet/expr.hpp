#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "lyapnet/error.hpp"

namespace lyapnet {

enum class NodeKind { kConstant, kVariable, kUnary, kBinary };
enum class UnaryOp { kNeg, kSin, kCos, kExp, kAbs };
enum class BinaryOp { kAdd, kSub, kMul, kDiv, kPow };

/// Raised by parse(). `offset()` is the byte offset into the source text.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : ConfigError(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct ExprNode;

/// Immutable scalar expression over state variables x1..xn.
///
/// Copies share the underlying tree. Evaluation is left to right and never
/// mutates, so one Expr may be evaluated from several threads.
class Expr {
 public:
  static Expr constant(double value);
  /// `index` is 1-based: variable(1) is x1.
  static Expr variable(int index);
  static Expr unary(UnaryOp op, Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

  NodeKind kind() const;
  double constant_value() const;
  int variable_index() const;
  UnaryOp unary_op() const;
  BinaryOp binary_op() const;
  const Expr& operand() const;
  const Expr& lhs() const;
  const Expr& rhs() const;

  /// Largest variable index referenced; 0 for a closed expression.
  int max_variable() const;

  /// IEEE double evaluation. Requires x.size() >= max_variable().
  /// Division by zero and domain errors yield inf/NaN rather than throwing.
  double eval(std::span<const double> x) const;

  /// Fully parenthesized text that parse() maps back to an identical tree.
  /// Negative constants (which parse() never creates) print as a negation.
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

/// Parses infix text over x1..x<dim>. Operators + - * / ^ with the usual
/// precedence (^ binds tighter than unary minus, and is right-associative);
/// functions sin, cos, exp, abs.
Expr parse(std::string_view source, int dim);

/// x^y as evaluated by Expr: integer-valued exponents use repeated
/// multiplication, anything else exp(y ln x), NaN for negative x.
double power(double base, double exponent);

}  // namespace lyapnet
