#include "lyapnet/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace lyapnet {

struct ExprNode {
  NodeKind kind;
  double value = 0.0;
  int index = 0;
  UnaryOp uop = UnaryOp::kNeg;
  BinaryOp bop = BinaryOp::kAdd;
  std::shared_ptr<const Expr> a;
  std::shared_ptr<const Expr> b;
  int max_var = 0;
};

Expr Expr::constant(double value) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::kConstant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(int index) {
  if (index < 1) throw std::invalid_argument("variable index must be >= 1");
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::kVariable;
  n->index = index;
  n->max_var = index;
  return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr operand) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::kUnary;
  n->uop = op;
  n->max_var = operand.max_variable();
  n->a = std::make_shared<const Expr>(std::move(operand));
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::kBinary;
  n->bop = op;
  n->max_var = std::max(lhs.max_variable(), rhs.max_variable());
  n->a = std::make_shared<const Expr>(std::move(lhs));
  n->b = std::make_shared<const Expr>(std::move(rhs));
  return Expr(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
int Expr::variable_index() const { return node_->index; }
UnaryOp Expr::unary_op() const { return node_->uop; }
BinaryOp Expr::binary_op() const { return node_->bop; }
const Expr& Expr::operand() const { return *node_->a; }
const Expr& Expr::lhs() const { return *node_->a; }
const Expr& Expr::rhs() const { return *node_->b; }
int Expr::max_variable() const { return node_->max_var; }

double power(double base, double exponent) {
  if (exponent == std::trunc(exponent) && std::abs(exponent) <= 1024.0) {
    auto n = static_cast<long>(std::abs(exponent));
    double result = 1.0;
    double factor = base;
    // Plain left-to-right product for small powers keeps x^2 == x*x and
    // x^3 == x*x*x bitwise.
    if (n <= 8) {
      for (long i = 0; i < n; ++i) result *= factor;
    } else {
      while (n > 0) {
        if (n & 1) result *= factor;
        factor *= factor;
        n >>= 1;
      }
    }
    return exponent < 0 ? 1.0 / result : result;
  }
  if (base < 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::exp(exponent * std::log(base));
}

double Expr::eval(std::span<const double> x) const {
  const ExprNode& n = *node_;
  switch (n.kind) {
    case NodeKind::kConstant:
      return n.value;
    case NodeKind::kVariable:
      return x[static_cast<std::size_t>(n.index - 1)];
    case NodeKind::kUnary: {
      const double v = n.a->eval(x);
      switch (n.uop) {
        case UnaryOp::kNeg: return -v;
        case UnaryOp::kSin: return std::sin(v);
        case UnaryOp::kCos: return std::cos(v);
        case UnaryOp::kExp: return std::exp(v);
        case UnaryOp::kAbs: return std::abs(v);
      }
      break;
    }
    case NodeKind::kBinary: {
      const double l = n.a->eval(x);
      const double r = n.b->eval(x);
      switch (n.bop) {
        case BinaryOp::kAdd: return l + r;
        case BinaryOp::kSub: return l - r;
        case BinaryOp::kMul: return l * r;
        case BinaryOp::kDiv: return l / r;
        case BinaryOp::kPow: return power(l, r);
      }
      break;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::kNeg: return "-";
    case UnaryOp::kSin: return "sin";
    case UnaryOp::kCos: return "cos";
    case UnaryOp::kExp: return "exp";
    case UnaryOp::kAbs: return "abs";
  }
  return "?";
}

char binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return '+';
    case BinaryOp::kSub: return '-';
    case BinaryOp::kMul: return '*';
    case BinaryOp::kDiv: return '/';
    case BinaryOp::kPow: return '^';
  }
  return '?';
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s == "inf" || s == "-inf" || s == "nan" || s == "-nan") {
    throw std::domain_error("cannot print non-finite constant");
  }
  return s;
}

}  // namespace

std::string Expr::to_string() const {
  const ExprNode& n = *node_;
  switch (n.kind) {
    case NodeKind::kConstant: {
      // Negative literals are printed as a negation node would be, so the
      // parser reads them back as constants only when non-negative.
      if (std::signbit(n.value)) return "(-" + format_number(-n.value) + ")";
      return format_number(n.value);
    }
    case NodeKind::kVariable:
      return "x" + std::to_string(n.index);
    case NodeKind::kUnary:
      if (n.uop == UnaryOp::kNeg) return "(-" + n.a->to_string() + ")";
      return std::string(unary_name(n.uop)) + "(" + n.a->to_string() + ")";
    case NodeKind::kBinary:
      return "(" + n.a->to_string() + " " + binary_symbol(n.bop) + " " + n.b->to_string() + ")";
  }
  return "?";
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::kConstant: {
      const double x = a.constant_value();
      const double y = b.constant_value();
      return x == y && std::signbit(x) == std::signbit(y);
    }
    case NodeKind::kVariable:
      return a.variable_index() == b.variable_index();
    case NodeKind::kUnary:
      return a.unary_op() == b.unary_op() && a.operand() == b.operand();
    case NodeKind::kBinary:
      return a.binary_op() == b.binary_op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

namespace {

// expr    := term (('+' | '-') term)*
// term    := unary (('*' | '/') unary)*
// unary   := '-' unary | '+' unary | power
// power   := primary ('^' unary)?
// primary := number | 'x'<digits> | func '(' expr ')' | '(' expr ')'
class Parser {
 public:
  Parser(std::string_view src, int dim) : src_(src), dim_(dim) {}

  Expr parse_all() {
    skip_space();
    if (pos_ == src_.size()) fail("empty expression");
    Expr e = parse_expr();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ == src_.size()) fail(std::string("expected '") + c + "' but reached end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (accept('+')) {
        e = Expr::binary(BinaryOp::kAdd, e, parse_term());
      } else if (accept('-')) {
        e = Expr::binary(BinaryOp::kSub, e, parse_term());
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    for (;;) {
      if (accept('*')) {
        e = Expr::binary(BinaryOp::kMul, e, parse_unary());
      } else if (accept('/')) {
        e = Expr::binary(BinaryOp::kDiv, e, parse_unary());
      } else {
        return e;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::unary(UnaryOp::kNeg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return Expr::binary(BinaryOp::kPow, base, parse_unary());
    return base;
  }

  Expr parse_primary() {
    skip_space();
    if (pos_ == src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr parse_number() {
    double value = 0.0;
    auto [end, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), value);
    if (ec == std::errc::result_out_of_range) fail("numeric literal out of range");
    if (ec != std::errc()) fail("malformed number");
    pos_ = static_cast<std::size_t>(end - src_.data());
    // "2x1" is not implicit multiplication.
    if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      fail("unexpected '" + std::string(1, src_[pos_]) + "' after number");
    }
    return Expr::constant(value);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);

    if (name == "sin" || name == "cos" || name == "exp" || name == "abs") {
      const UnaryOp op = name == "sin"   ? UnaryOp::kSin
                         : name == "cos" ? UnaryOp::kCos
                         : name == "exp" ? UnaryOp::kExp
                                         : UnaryOp::kAbs;
      expect('(');
      Expr arg = parse_expr();
      expect(')');
      return Expr::unary(op, arg);
    }

    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (char d : name.substr(1)) digits = digits && std::isdigit(static_cast<unsigned char>(d));
      if (digits && name[1] != '0') {
        int index = 0;
        auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
        if (ec != std::errc() || index > dim_) {
          pos_ = start;
          fail("variable " + std::string(name) + " out of range for dimension " + std::to_string(dim_));
        }
        return Expr::variable(index);
      }
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view src_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view source, int dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  return Parser(source, dim).parse_all();
}

}  // namespace lyapnet
