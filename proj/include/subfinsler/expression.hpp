#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "subfinsler/graph_field.hpp"

namespace subfinsler {

/// Arithmetic expressions in x and t:
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*
///   factor := unary
///   unary  := ('+' | '-') unary | power
///   power  := base ('^' unary)?          right associative, -2^2 = -4
///   base   := number | 'x' | 't' | function '(' expr ')' | '(' expr ')'
/// with functions sin cos exp sqrt abs tanh. Derivatives are symbolic and
/// folded; the derivative of abs uses an internal sign node and that of a
/// variable exponent an internal log node.
class Expression {
 public:
  /// Throws ExpressionError(SyntaxError) at the offending byte offset.
  static Expression parse(std::string_view source);
  static Expression constant(double value);

  /// Throws ExpressionError(EvaluationError) located at the failing operator
  /// (division by zero, sqrt or log of a negative, non-finite results).
  double eval(double x, double t) const;

  Expression dx() const;
  Expression dt() const;

  /// Fully parenthesized rendering, parseable by parse() when no internal
  /// nodes are present.
  std::string to_string() const;
  const std::string& source() const { return source_; }

  bool uses_abs() const;
  bool depends_on_x() const;
  bool depends_on_t() const;

  struct Node;

 private:
  Expression(std::shared_ptr<const Node> root, std::string source)
      : root_(std::move(root)), source_(std::move(source)) {}
  std::shared_ptr<const Node> root_;
  std::string source_;
};

/// Analytic field u with symbolic u_x, u_t.
GraphField expression_field(const Domain& domain, const Expression& u);

}  // namespace subfinsler
