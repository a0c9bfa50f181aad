#include "semispec/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "semispec/error.hpp"

namespace semispec {

namespace {

using Node = PotentialExpr::Node;
using Kind = PotentialExpr::Kind;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(Kind kind, NodePtr lhs = {}, NodePtr rhs = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr make_constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = v;
  return n;
}

NodePtr make_var(Variable v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = v;
  return n;
}

NodePtr make_pow(NodePtr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pow;
  n->lhs = std::move(base);
  n->exponent = exponent;
  return n;
}

double eval_node(const Node& n, double x, double y) {
  switch (n.kind) {
    case Kind::Constant: return n.value;
    case Kind::Var: return n.var == Variable::X ? x : y;
    case Kind::Add: return eval_node(*n.lhs, x, y) + eval_node(*n.rhs, x, y);
    case Kind::Sub: return eval_node(*n.lhs, x, y) - eval_node(*n.rhs, x, y);
    case Kind::Mul: return eval_node(*n.lhs, x, y) * eval_node(*n.rhs, x, y);
    case Kind::Div: return eval_node(*n.lhs, x, y) / eval_node(*n.rhs, x, y);
    case Kind::Neg: return -eval_node(*n.lhs, x, y);
    case Kind::Pow: {
      const double b = eval_node(*n.lhs, x, y);
      double r = 1.0;
      for (int i = 0; i < n.exponent; ++i) r *= b;
      return r;
    }
  }
  return 0.0;
}

bool node_uses(const Node& n, Variable v) {
  if (n.kind == Kind::Var) return n.var == v;
  if (n.kind == Kind::Constant) return false;
  return (n.lhs && node_uses(*n.lhs, v)) || (n.rhs && node_uses(*n.rhs, v));
}

bool node_constant(const Node& n) {
  return !node_uses(n, Variable::X) && !node_uses(n, Variable::Y);
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    case Kind::Constant: return n.value < 0 ? 3 : 5;
    case Kind::Var: return 5;
  }
  return 5;
}

std::string render(const Node& n);

std::string wrap(const Node& child, int min_prec) {
  std::string s = render(child);
  return precedence(child) < min_prec ? "(" + s + ")" : s;
}

std::string render(const Node& n) {
  switch (n.kind) {
    case Kind::Constant: return format_number(n.value);
    case Kind::Var: return n.var == Variable::X ? "x" : "y";
    case Kind::Add: return wrap(*n.lhs, 1) + " + " + wrap(*n.rhs, 1);
    case Kind::Sub: return wrap(*n.lhs, 1) + " - " + wrap(*n.rhs, 2);
    case Kind::Mul: return wrap(*n.lhs, 2) + "*" + wrap(*n.rhs, 3);
    case Kind::Div: return wrap(*n.lhs, 2) + "/" + wrap(*n.rhs, 3);
    case Kind::Neg: return "-" + wrap(*n.lhs, 3);
    case Kind::Pow: return wrap(*n.lhs, 5) + "^" + std::to_string(n.exponent);
  }
  return {};
}

std::string structure_of(const Node& n) {
  switch (n.kind) {
    case Kind::Constant: return format_number(n.value);
    case Kind::Var: return n.var == Variable::X ? "x" : "y";
    case Kind::Add: return "Add(" + structure_of(*n.lhs) + "," + structure_of(*n.rhs) + ")";
    case Kind::Sub: return "Sub(" + structure_of(*n.lhs) + "," + structure_of(*n.rhs) + ")";
    case Kind::Mul: return "Mul(" + structure_of(*n.lhs) + "," + structure_of(*n.rhs) + ")";
    case Kind::Div: return "Div(" + structure_of(*n.lhs) + "," + structure_of(*n.rhs) + ")";
    case Kind::Neg: return "Neg(" + structure_of(*n.lhs) + ")";
    case Kind::Pow:
      return "Pow(" + structure_of(*n.lhs) + "," + std::to_string(n.exponent) + ")";
  }
  return {};
}

bool is_const(const NodePtr& n, double v) { return n->kind == Kind::Constant && n->value == v; }

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "empty expression");
    NodePtr e = expr();
    skip_ws();
    if (pos_ < text_.size()) {
      throw ParseError(pos_, std::string("unexpected character '") + text_[pos_] + "'");
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Kind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make_node(Kind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Kind::Mul, lhs, unary());
      } else if (accept('/')) {
        skip_ws();
        const std::size_t at = pos_;
        NodePtr rhs = unary();
        if (!node_constant(*rhs)) throw ParseError(at, "division by a non-constant expression");
        if (eval_node(*rhs, 0.0, 0.0) == 0.0) throw ParseError(at, "division by zero");
        lhs = make_node(Kind::Div, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_node(Kind::Neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t at = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') throw ParseError(at, "negative exponent");
    const double e = number_literal("exponent");
    if (e != std::floor(e) || e > 64) throw ParseError(at, "non-integer exponent");
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '^') {
      throw ParseError(pos_, "chained exponent requires parentheses");
    }
    return make_pow(base, static_cast<int>(e));
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      skip_ws();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return inner;
    }
    if (c == 'x') {
      ++pos_;
      return make_var(Variable::X);
    }
    if (c == 'y') {
      if (dim_ < 2) throw ParseError(pos_, "variable y used in a 1D potential");
      ++pos_;
      return make_var(Variable::Y);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return make_constant(number_literal("number"));
    }
    throw ParseError(pos_, std::string("unexpected character '") + c + "'");
  }

  double number_literal(const char* what) {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    // optional exponent part
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    if (start == pos_) {
      if (start >= text_.size()) throw ParseError(start, "unexpected end of input");
      throw ParseError(start, std::string("expected ") + what);
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      throw ParseError(start, std::string("malformed ") + what);
    }
    return v;
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

PotentialExpr::PotentialExpr() : root_(make_constant(0.0)) {}

PotentialExpr::PotentialExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

PotentialExpr PotentialExpr::constant(double value) { return PotentialExpr(make_constant(value)); }

PotentialExpr PotentialExpr::variable(Variable v) { return PotentialExpr(make_var(v)); }

double PotentialExpr::evaluate(double x, double y) const { return eval_node(*root_, x, y); }

bool PotentialExpr::is_constant() const { return node_constant(*root_); }

bool PotentialExpr::uses(Variable v) const { return node_uses(*root_, v); }

std::string PotentialExpr::to_string() const { return render(*root_); }

std::string PotentialExpr::structure() const { return structure_of(*root_); }

// The operators below are the simplifying constructors used by differentiate().

PotentialExpr operator+(const PotentialExpr& a, const PotentialExpr& b) {
  if (a.is_constant() && b.is_constant()) return PotentialExpr::constant(a.evaluate(0, 0) + b.evaluate(0, 0));
  if (is_const(a.root_, 0.0)) return b;
  if (is_const(b.root_, 0.0)) return a;
  return PotentialExpr(make_node(Kind::Add, a.root_, b.root_));
}

PotentialExpr operator-(const PotentialExpr& a, const PotentialExpr& b) {
  if (a.is_constant() && b.is_constant()) return PotentialExpr::constant(a.evaluate(0, 0) - b.evaluate(0, 0));
  if (is_const(b.root_, 0.0)) return a;
  if (is_const(a.root_, 0.0)) return -b;
  return PotentialExpr(make_node(Kind::Sub, a.root_, b.root_));
}

PotentialExpr operator*(const PotentialExpr& a, const PotentialExpr& b) {
  if (a.is_constant() && b.is_constant()) return PotentialExpr::constant(a.evaluate(0, 0) * b.evaluate(0, 0));
  if (is_const(a.root_, 0.0) || is_const(b.root_, 0.0)) return PotentialExpr::constant(0.0);
  if (is_const(a.root_, 1.0)) return b;
  if (is_const(b.root_, 1.0)) return a;
  // keep constants on the left: e*c -> c*e
  if (b.root_->kind == Kind::Constant) return PotentialExpr(make_node(Kind::Mul, b.root_, a.root_));
  return PotentialExpr(make_node(Kind::Mul, a.root_, b.root_));
}

PotentialExpr operator/(const PotentialExpr& a, const PotentialExpr& b) {
  if (!b.is_constant()) throw ConfigError("division by a non-constant expression");
  const double d = b.evaluate(0, 0);
  if (d == 0.0) throw ConfigError("division by zero");
  if (a.is_constant()) return PotentialExpr::constant(a.evaluate(0, 0) / d);
  if (d == 1.0) return a;
  return PotentialExpr(make_node(Kind::Div, a.root_, make_constant(d)));
}

PotentialExpr operator-(const PotentialExpr& a) {
  if (a.is_constant()) return PotentialExpr::constant(-a.evaluate(0, 0));
  if (a.root_->kind == Kind::Neg) return PotentialExpr(a.root_->lhs);
  return PotentialExpr(make_node(Kind::Neg, a.root_));
}

PotentialExpr pow(const PotentialExpr& base, int exponent) {
  if (exponent == 0) return PotentialExpr::constant(1.0);
  if (exponent == 1) return base;
  if (base.is_constant()) return PotentialExpr::constant(std::pow(base.evaluate(0, 0), exponent));
  return PotentialExpr(make_pow(base.root_, exponent));
}

PotentialExpr parse_potential(std::string_view text, int dim) {
  if (dim != 1 && dim != 2) throw ConfigError("potential dimension must be 1 or 2");
  return PotentialExpr(Parser(text, dim).parse());
}

PotentialExpr differentiate(const PotentialExpr& expr, Variable var) {
  const Node& n = expr.root();
  auto sub = [](const NodePtr& p) { return PotentialExpr(p); };
  switch (n.kind) {
    case Kind::Constant: return PotentialExpr::constant(0.0);
    case Kind::Var: return PotentialExpr::constant(n.var == var ? 1.0 : 0.0);
    case Kind::Add: return differentiate(sub(n.lhs), var) + differentiate(sub(n.rhs), var);
    case Kind::Sub: return differentiate(sub(n.lhs), var) - differentiate(sub(n.rhs), var);
    case Kind::Mul:
      return differentiate(sub(n.lhs), var) * sub(n.rhs) + sub(n.lhs) * differentiate(sub(n.rhs), var);
    case Kind::Div: return differentiate(sub(n.lhs), var) / sub(n.rhs);
    case Kind::Neg: return -differentiate(sub(n.lhs), var);
    case Kind::Pow:
      return PotentialExpr::constant(n.exponent) * pow(sub(n.lhs), n.exponent - 1) *
             differentiate(sub(n.lhs), var);
  }
  return PotentialExpr::constant(0.0);
}

}  // namespace semispec
