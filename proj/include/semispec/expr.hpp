#pragma once

// Polynomial-like potential expressions: parsing, evaluation and exact
// symbolic differentiation.
//
// Grammar (whitespace ignored):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' integer)?
//   primary := number | 'x' | 'y' | '(' expr ')'
//
// Exponents are non-negative integer literals. Divisors must fold to a nonzero
// constant, so every expression is a polynomial in x, y.

#include <memory>
#include <string>
#include <string_view>

namespace semispec {

enum class Variable { X = 0, Y = 1 };

class PotentialExpr {
 public:
  enum class Kind { Constant, Var, Add, Sub, Mul, Div, Pow, Neg };

  struct Node {
    Kind kind = Kind::Constant;
    double value = 0.0;           // Constant
    Variable var = Variable::X;   // Var
    int exponent = 0;             // Pow
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  PotentialExpr();  // the constant 0
  explicit PotentialExpr(std::shared_ptr<const Node> root);

  static PotentialExpr constant(double value);
  static PotentialExpr variable(Variable v);

  Kind kind() const { return root_->kind; }
  const Node& root() const { return *root_; }

  double evaluate(double x, double y = 0.0) const;

  bool is_constant() const;          // no variable occurs
  bool uses(Variable v) const;

  /// Conventional infix rendering with minimal parentheses, e.g. "2*x".
  std::string to_string() const;
  /// Structural rendering, e.g. "Add(Pow(x,2),Mul(2,Pow(y,2)))".
  std::string structure() const;

  friend PotentialExpr operator+(const PotentialExpr& a, const PotentialExpr& b);
  friend PotentialExpr operator-(const PotentialExpr& a, const PotentialExpr& b);
  friend PotentialExpr operator*(const PotentialExpr& a, const PotentialExpr& b);
  friend PotentialExpr operator/(const PotentialExpr& a, const PotentialExpr& b);
  friend PotentialExpr operator-(const PotentialExpr& a);
  friend PotentialExpr pow(const PotentialExpr& base, int exponent);

 private:
  std::shared_ptr<const Node> root_;
};

/// Parses `text` for a potential of dimension `dim` (1 or 2). The returned tree
/// mirrors the source literally; no simplification is applied.
/// Throws ParseError with the byte offset of the offending token.
PotentialExpr parse_potential(std::string_view text, int dim);

/// Exact derivative, simplified (0*e -> 0, 1*e -> e, constant folding).
PotentialExpr differentiate(const PotentialExpr& expr, Variable var);

}  // namespace semispec
