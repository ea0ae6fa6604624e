#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "weylkit/chart.hpp"

namespace weylkit {

// Immutable closed-form coordinate expression. The grammar supports +, -, *,
// /, ^ with an integer exponent, unary minus, parentheses and the functions
// sin, cos, exp, ln, sqrt, tanh over chart coordinates and real literals.
// Precedence: ^  >  unary -  >  * /  >  + -, all binaries left-associative.
//
// Evaluation either yields a finite double or throws DomainError; partial
// derivatives are exact ASTs (no discretization), total for every supported
// node. No simplification is performed beyond constant folding.
class ScalarExpr {
 public:
  ScalarExpr();  // constant 0

  static ScalarExpr constant(double value);
  static ScalarExpr coordinate(int index);

  // Parses text against the chart's coordinate names. Throws ParseError with
  // the byte offset of the offending token.
  static ScalarExpr parse(std::string_view text, const Chart& chart);

  double eval(std::span<const double> point) const;
  ScalarExpr differentiate(int coord) const;

  std::string to_string() const;  // default x0..x{n-1} coordinate names
  std::string to_string(const Chart& chart) const;

  bool is_constant() const;
  double constant_value() const;  // requires is_constant()
  int min_dim() const;            // 1 + highest coordinate index referenced

  ScalarExpr pow(int exponent) const;
  ScalarExpr operator-() const;

  friend ScalarExpr operator+(const ScalarExpr&, const ScalarExpr&);
  friend ScalarExpr operator-(const ScalarExpr&, const ScalarExpr&);
  friend ScalarExpr operator*(const ScalarExpr&, const ScalarExpr&);
  friend ScalarExpr operator/(const ScalarExpr&, const ScalarExpr&);

  friend ScalarExpr sin(const ScalarExpr&);
  friend ScalarExpr cos(const ScalarExpr&);
  friend ScalarExpr exp(const ScalarExpr&);
  friend ScalarExpr ln(const ScalarExpr&);
  friend ScalarExpr sqrt(const ScalarExpr&);
  friend ScalarExpr tanh(const ScalarExpr&);

  struct Node;  // AST node; opaque outside the implementation
  using NodePtr = std::shared_ptr<const Node>;

 private:
  explicit ScalarExpr(NodePtr node);
  NodePtr node_;
};

}  // namespace weylkit
