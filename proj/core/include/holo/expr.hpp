#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "holo/errors.hpp"

// A small expression language for closed-form scalar, vector and matrix
// valued functions of real inputs x0..x(k-1).  Grammar (EBNF):
//
//   expr    = term { ("+" | "-") term } ;
//   term    = unary { ("*" | "/") unary } ;
//   unary   = "-" unary | power ;
//   power   = primary [ "^" unary ] ;              (right associative)
//   primary = number | "pi" | input | call | "(" expr ")" | bracket ;
//   bracket = "[" expr { "," expr } "]"            (vector literal)
//           | "[" row { "," row } "]" ;            (matrix literal, row-major)
//   row     = "[" expr { "," expr } "]" ;
//   call    = ident "(" expr { "," expr } ")" ;
//   ident   = "sin" | "cos" | "exp" | "log" | "beta" | "dbeta<k>"
//           | "mexp" | "mexpd" ;
//   input   = "x" digits ;
//
// "*" doubles as the matrix product, "mexp" is the matrix exponential and
// "beta" is the fixed smoothing function: smooth, non-decreasing, 0 on
// [0, 0.1] and 1 on [0.9, 1] (built as a normalized bump integral).
// "dbeta<k>" (k = 0, 1, ...) is the (k+1)-th derivative of beta; it appears
// in printed derivatives and is accepted back by the parser so that
// parse . print = id.  "mexpd" is the directional (Frechet-type) derivative
// chain of the matrix exponential produced by diff; see MExpChain below.
//
// Expressions are immutable after parse and safe to evaluate concurrently.

namespace holo::dsl {

enum class ShapeKind { Scalar, Vector, Matrix };

struct Shape {
  ShapeKind kind = ShapeKind::Scalar;
  int rows = 1;
  int cols = 1;

  static Shape scalar() { return {ShapeKind::Scalar, 1, 1}; }
  static Shape vector(int n) { return {ShapeKind::Vector, n, 1}; }
  static Shape matrix(int n, int m) { return {ShapeKind::Matrix, n, m}; }

  bool operator==(const Shape&) const = default;
  std::string str() const;
};

/// Evaluation result: the data of a scalar is a 1x1 matrix, of a vector an
/// n x 1 matrix.  The shape tag keeps scalar/vector/matrix semantics apart.
struct Value {
  Shape shape;
  Eigen::MatrixXd data;

  double scalar() const { return data(0, 0); }
};

enum class NodeKind {
  Const,      // literal (pi included, stored numerically with a print tag)
  Input,      // x<i>
  Neg,
  Add,
  Sub,
  Mul,        // scalar*any, any*scalar, matrix*matrix, matrix*vector
  Div,        // any / scalar
  Pow,        // scalar ^ scalar
  Sin,
  Cos,
  Exp,
  Log,
  Beta,       // the smoothing function
  BumpDeriv,  // order k: the (k+1)-th derivative of Beta (normalized bump derivs)
  MatrixLit,  // kids row-major; covers vector literals (cols == 1)
  MExpChain,  // kids [M, E1..Ek]; k = 0 is mexp(M), k >= 1 the derivative chains
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  Shape shape;
  double value = 0.0;        // Const
  bool is_pi = false;        // Const printed as "pi"
  int index = 0;             // Input: input index; BumpDeriv: order k
  std::vector<NodePtr> kids;
};

/// A parsed function R^arity -> (scalar | vector | matrix).
struct ExprFn {
  int arity = 0;
  Shape shape;
  NodePtr root;
};

ExprFn parse_expr(const std::string& src, int arity, const Shape& expected);

/// Shape-inferring parse; the declared result shape is whatever comes out.
ExprFn parse_expr(const std::string& src, int arity);

Value eval(const ExprFn& f, const Eigen::VectorXd& point);

/// Exact symbolic partial derivative with respect to input i.
ExprFn diff(const ExprFn& f, int input_index);

/// Canonical text form; parse(print(f)) is structurally equal to f.
std::string print(const ExprFn& f);

bool equal(const ExprFn& a, const ExprFn& b);

/// Simultaneous substitution: input i of f is replaced by args[i] (all args
/// share the new arity).  Used to compose paths with reparameterizations.
ExprFn subst(const ExprFn& f, const std::vector<ExprFn>& args, int new_arity);

/// Convenience builders used by path and gauge constructions.
ExprFn const_fn(double c, int arity);
ExprFn input_fn(int index, int arity);
ExprFn affine_input_fn(double scale, double shift, int arity, int index = 0);
ExprFn beta_expr();  // t |-> beta(t), arity 1
ExprFn fn_add(const ExprFn& a, const ExprFn& b);
ExprFn fn_mul(const ExprFn& a, const ExprFn& b);

/// Vector literal from scalar components (all of the same arity).
ExprFn fn_vector(const std::vector<ExprFn>& components);

/// Row i of a vector-valued expression whose root is a literal.  Transition
/// maps must be written as coordinate-list literals for this to work; the
/// config loader enforces that.
ExprFn component(const ExprFn& f, int index);

/// beta and its first derivative as plain functions (same values the
/// evaluator produces for the Beta / BumpDeriv nodes).
double beta(double t);
double beta_deriv(double t, int order = 1);

}  // namespace holo::dsl
