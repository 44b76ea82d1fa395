#include "holo/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "holo/detail/matfun.hpp"

namespace holo::dsl {

std::string Shape::str() const {
  switch (kind) {
    case ShapeKind::Scalar:
      return "scalar";
    case ShapeKind::Vector:
      return "vector(" + std::to_string(rows) + ")";
    case ShapeKind::Matrix:
      return "matrix(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
  }
  return "?";
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// The smoothing function beta.
//
// bump(u) = exp(-1/((u - LO)(HI - u))) on (LO, HI), zero elsewhere;
// beta(t) = integral_LO^t bump / integral_LO^HI bump, clamped to [0,1]
// outside the ramp.  Flat zones are pinned at [0, 0.1] and [0.9, 1].
// ---------------------------------------------------------------------------

constexpr double kBetaLo = 0.1;
constexpr double kBetaHi = 0.9;

// Below this value of p = (u-LO)(HI-u) the bump and all derivatives we use
// are < 1e-100; returning exact zero keeps the derivative recursion finite.
constexpr double kBumpCut = 3e-3;

double bump_raw(double u) {
  const double p = (u - kBetaLo) * (kBetaHi - u);
  if (p <= kBumpCut) return 0.0;
  return std::exp(-1.0 / p);
}

// k-th derivative of bump_raw.  Uses the recursions
//   r = 1/p:        r^(k) = -(k p' r^(k-1) + k(k-1)/2 p'' r^(k-2)) / p
//   psi = exp(-r):  psi^(k) = sum_j C(k-1,j) (-r)^(j+1) psi^(k-1-j)
// with p quadratic, so only p' and p'' contribute.
double bump_raw_deriv(int k, double u) {
  const double p = (u - kBetaLo) * (kBetaHi - u);
  if (p <= kBumpCut) return 0.0;
  if (k == 0) return std::exp(-1.0 / p);

  const double dp = (kBetaLo + kBetaHi) - 2.0 * u;
  const double ddp = -2.0;

  std::vector<double> r(static_cast<std::size_t>(k) + 1);
  r[0] = 1.0 / p;
  for (int n = 1; n <= k; ++n) {
    double acc = static_cast<double>(n) * dp * r[static_cast<std::size_t>(n - 1)];
    if (n >= 2)
      acc += 0.5 * static_cast<double>(n) * static_cast<double>(n - 1) * ddp *
             r[static_cast<std::size_t>(n - 2)];
    r[static_cast<std::size_t>(n)] = -acc / p;
  }

  std::vector<double> psi(static_cast<std::size_t>(k) + 1);
  psi[0] = std::exp(-r[0]);
  std::vector<double> binom(static_cast<std::size_t>(k) + 1, 0.0);
  for (int n = 1; n <= k; ++n) {
    // binomial row C(n-1, j)
    binom[0] = 1.0;
    for (int j = n - 1; j >= 1; --j) binom[static_cast<std::size_t>(j)] =
        (j <= n - 2 ? binom[static_cast<std::size_t>(j)] : 0.0) + binom[static_cast<std::size_t>(j - 1)];
    double acc = 0.0;
    for (int j = 0; j <= n - 1; ++j)
      acc += binom[static_cast<std::size_t>(j)] * (-r[static_cast<std::size_t>(j + 1)]) *
             psi[static_cast<std::size_t>(n - 1 - j)];
    psi[static_cast<std::size_t>(n)] = acc;
  }
  return psi[static_cast<std::size_t>(k)];
}

// 16-point Gauss-Legendre rule on [-1, 1].
constexpr int kGl = 16;
constexpr double kGlX[kGl] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGlW[kGl] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

double gl_integrate_bump(double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < kGl; ++i) s += kGlW[i] * bump_raw(mid + half * kGlX[i]);
  return s * half;
}

constexpr int kPanels = 32;

struct BumpTable {
  double cum[kPanels + 1];  // cumulative integral at panel boundaries
  double total;
  BumpTable() {
    cum[0] = 0.0;
    const double w = (kBetaHi - kBetaLo) / kPanels;
    for (int j = 0; j < kPanels; ++j)
      cum[j + 1] = cum[j] + gl_integrate_bump(kBetaLo + j * w, kBetaLo + (j + 1) * w);
    total = cum[kPanels];
  }
};

const BumpTable& bump_table() {
  static const BumpTable t;
  return t;
}

double beta_impl(double t) {
  if (t <= kBetaLo) return 0.0;
  if (t >= kBetaHi) return 1.0;
  const BumpTable& tab = bump_table();
  const double w = (kBetaHi - kBetaLo) / kPanels;
  int j = static_cast<int>((t - kBetaLo) / w);
  if (j >= kPanels) j = kPanels - 1;
  const double left = kBetaLo + j * w;
  return (tab.cum[j] + gl_integrate_bump(left, t)) / tab.total;
}

}  // namespace

double beta(double t) {
  if (t < 0.0 || t > 1.0)
    throw OutOfRange("beta: argument " + std::to_string(t) + " outside [0,1]");
  return beta_impl(t);
}

double beta_deriv(double t, int order) {
  return bump_raw_deriv(order - 1, t) / bump_table().total;
}

// ---------------------------------------------------------------------------
// AST construction with shape inference
// ---------------------------------------------------------------------------

namespace {

NodePtr make(NodeKind kind, Shape shape, std::vector<NodePtr> kids = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->shape = shape;
  n->kids = std::move(kids);
  return n;
}

NodePtr make_const(double v, bool pi = false) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Const;
  n->shape = Shape::scalar();
  n->value = v;
  n->is_pi = pi;
  return n;
}

NodePtr make_input(int idx) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Input;
  n->shape = Shape::scalar();
  n->index = idx;
  return n;
}

bool is_scalar(const NodePtr& n) { return n->shape.kind == ShapeKind::Scalar; }

[[noreturn]] void shape_fail(const std::string& op, const NodePtr& a, const NodePtr& b) {
  throw ShapeError("operand shapes " + a->shape.str() + " and " + b->shape.str() +
                   " do not fit '" + op + "'");
}

NodePtr make_add(NodeKind kind, NodePtr a, NodePtr b) {
  if (!(a->shape == b->shape)) shape_fail(kind == NodeKind::Add ? "+" : "-", a, b);
  Shape s = a->shape;
  return make(kind, s, {std::move(a), std::move(b)});
}

NodePtr make_mul(NodePtr a, NodePtr b) {
  Shape s;
  if (is_scalar(a))
    s = b->shape;
  else if (is_scalar(b))
    s = a->shape;
  else if (a->shape.kind == ShapeKind::Matrix && b->shape.kind == ShapeKind::Matrix &&
           a->shape.cols == b->shape.rows)
    s = Shape::matrix(a->shape.rows, b->shape.cols);
  else if (a->shape.kind == ShapeKind::Matrix && b->shape.kind == ShapeKind::Vector &&
           a->shape.cols == b->shape.rows)
    s = Shape::vector(a->shape.rows);
  else
    shape_fail("*", a, b);
  return make(NodeKind::Mul, s, {std::move(a), std::move(b)});
}

NodePtr make_div(NodePtr a, NodePtr b) {
  if (!is_scalar(b)) shape_fail("/", a, b);
  Shape s = a->shape;
  return make(NodeKind::Div, s, {std::move(a), std::move(b)});
}

NodePtr make_pow(NodePtr a, NodePtr b) {
  if (!is_scalar(a) || !is_scalar(b)) shape_fail("^", a, b);
  return make(NodeKind::Pow, Shape::scalar(), {std::move(a), std::move(b)});
}

NodePtr make_neg(NodePtr a) {
  // constants absorb unary minus so that "-1" round-trips as one node
  if (a->kind == NodeKind::Const && !a->is_pi) return make_const(-a->value);
  Shape s = a->shape;
  return make(NodeKind::Neg, s, {std::move(a)});
}

NodePtr make_unary(NodeKind kind, NodePtr a, const std::string& name) {
  if (!is_scalar(a)) throw ShapeError(name + " expects a scalar, got " + a->shape.str());
  return make(kind, Shape::scalar(), {std::move(a)});
}

NodePtr make_bump_deriv(int order, NodePtr a) {
  if (!is_scalar(a)) throw ShapeError("dbeta expects a scalar, got " + a->shape.str());
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::BumpDeriv;
  n->shape = Shape::scalar();
  n->index = order;
  n->kids = {std::move(a)};
  return n;
}

NodePtr make_matrix_lit(Shape s, std::vector<NodePtr> elems) {
  for (const auto& e : elems)
    if (!is_scalar(e)) throw ShapeError("matrix entries must be scalar, got " + e->shape.str());
  return make(NodeKind::MatrixLit, s, std::move(elems));
}

NodePtr make_mexp_chain(std::vector<NodePtr> kids) {
  const Shape& ms = kids[0]->shape;
  if (ms.kind != ShapeKind::Matrix || ms.rows != ms.cols)
    throw ShapeError("mexp expects a square matrix, got " + ms.str());
  for (const auto& k : kids)
    if (!(k->shape == ms))
      throw ShapeError("mexpd arguments must share the shape " + ms.str());
  return make(NodeKind::MExpChain, ms, std::move(kids));
}

// ---------------------------------------------------------------------------
// Lexer / recursive-descent parser
// ---------------------------------------------------------------------------

struct Parser {
  const std::string& src;
  std::size_t pos = 0;
  int arity;

  explicit Parser(const std::string& s, int a) : src(s), arity(a) {}

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!eat(c)) throw SyntaxError(pos, std::string("expected '") + c + "' (" + what + ")");
  }

  bool peek(char c) {
    skip_ws();
    return pos < src.size() && src[pos] == c;
  }

  NodePtr parse_expr_rule() {
    NodePtr lhs = parse_term();
    for (;;) {
      skip_ws();
      if (eat('+'))
        lhs = make_add(NodeKind::Add, lhs, parse_term());
      else if (eat('-'))
        lhs = make_add(NodeKind::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (eat('*'))
        lhs = make_mul(lhs, parse_unary());
      else if (eat('/'))
        lhs = make_div(lhs, parse_unary());
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    if (eat('-')) return make_neg(parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    skip_ws();
    if (eat('^')) return make_pow(base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos >= src.size()) throw SyntaxError(pos, "unexpected end of input");
    const char c = src[pos];
    if (c == '(') {
      ++pos;
      NodePtr e = parse_expr_rule();
      expect(')', "to close '('");
      return e;
    }
    if (c == '[') return parse_bracket();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    throw SyntaxError(pos, std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const char* begin = src.c_str() + pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw SyntaxError(pos, "malformed number");
    pos += static_cast<std::size_t>(end - begin);
    return make_const(v);
  }

  NodePtr parse_bracket() {
    const std::size_t open = pos;
    expect('[', "bracket");
    skip_ws();
    if (peek('[')) {
      // matrix literal
      std::vector<NodePtr> elems;
      int rows = 0, cols = -1;
      do {
        expect('[', "matrix row");
        int c = 0;
        do {
          elems.push_back(parse_expr_rule());
          ++c;
        } while (eat(','));
        expect(']', "to close matrix row");
        if (cols < 0)
          cols = c;
        else if (c != cols)
          throw ShapeError("matrix rows of unequal length (" + std::to_string(cols) + " vs " +
                           std::to_string(c) + ") at offset " + std::to_string(open));
        ++rows;
      } while (eat(','));
      expect(']', "to close matrix literal");
      return make_matrix_lit(Shape::matrix(rows, cols), std::move(elems));
    }
    // vector literal
    std::vector<NodePtr> elems;
    do {
      elems.push_back(parse_expr_rule());
    } while (eat(','));
    expect(']', "to close vector literal");
    const int n = static_cast<int>(elems.size());
    return make_matrix_lit(Shape::vector(n), std::move(elems));
  }

  NodePtr parse_ident() {
    const std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    const std::string name = src.substr(start, pos - start);

    if (name == "pi") return make_const(kPi, true);

    if (name.size() >= 2 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      const int idx = std::atoi(name.c_str() + 1);
      if (idx >= arity)
        throw ArityError("unknown input '" + name + "' (declared arity " +
                         std::to_string(arity) + ")");
      return make_input(idx);
    }

    std::vector<NodePtr> args;
    expect('(', ("argument list of " + name).c_str());
    do {
      args.push_back(parse_expr_rule());
    } while (eat(','));
    expect(')', ("to close call of " + name).c_str());

    auto unary_arg = [&]() -> NodePtr {
      if (args.size() != 1)
        throw SyntaxError(start, name + " takes one argument, got " + std::to_string(args.size()));
      return args[0];
    };

    if (name == "sin") return make_unary(NodeKind::Sin, unary_arg(), name);
    if (name == "cos") return make_unary(NodeKind::Cos, unary_arg(), name);
    if (name == "exp") return make_unary(NodeKind::Exp, unary_arg(), name);
    if (name == "log") return make_unary(NodeKind::Log, unary_arg(), name);
    if (name == "beta") return make_unary(NodeKind::Beta, unary_arg(), name);
    if (name == "mexp") {
      if (args.size() != 1) throw SyntaxError(start, "mexp takes one argument");
      return make_mexp_chain(std::move(args));
    }
    if (name == "mexpd") {
      if (args.size() < 2) throw SyntaxError(start, "mexpd takes at least two arguments");
      return make_mexp_chain(std::move(args));
    }
    if (name.rfind("dbeta", 0) == 0 && name.size() > 5 &&
        std::all_of(name.begin() + 5, name.end(),
                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      return make_bump_deriv(std::atoi(name.c_str() + 5), unary_arg());
    }
    throw SyntaxError(start, "unknown function '" + name + "'");
  }
};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

Value eval_node(const Node& n, const Eigen::VectorXd& x) {
  auto as_value = [](const Shape& s, Eigen::MatrixXd m) { return Value{s, std::move(m)}; };
  auto scalar_value = [](double v) {
    return Value{Shape::scalar(), Eigen::MatrixXd::Constant(1, 1, v)};
  };

  switch (n.kind) {
    case NodeKind::Const:
      return scalar_value(n.value);
    case NodeKind::Input:
      return scalar_value(x[n.index]);
    case NodeKind::Neg: {
      Value a = eval_node(*n.kids[0], x);
      a.data = -a.data;
      return a;
    }
    case NodeKind::Add: {
      Value a = eval_node(*n.kids[0], x);
      const Value b = eval_node(*n.kids[1], x);
      a.data += b.data;
      return a;
    }
    case NodeKind::Sub: {
      Value a = eval_node(*n.kids[0], x);
      const Value b = eval_node(*n.kids[1], x);
      a.data -= b.data;
      return a;
    }
    case NodeKind::Mul: {
      const Value a = eval_node(*n.kids[0], x);
      const Value b = eval_node(*n.kids[1], x);
      if (a.shape.kind == ShapeKind::Scalar) return as_value(n.shape, a.scalar() * b.data);
      if (b.shape.kind == ShapeKind::Scalar) return as_value(n.shape, b.scalar() * a.data);
      return as_value(n.shape, a.data * b.data);
    }
    case NodeKind::Div: {
      const Value a = eval_node(*n.kids[0], x);
      const double d = eval_node(*n.kids[1], x).scalar();
      if (d == 0.0) throw DomainError("division by zero");
      return as_value(n.shape, a.data / d);
    }
    case NodeKind::Pow: {
      const double a = eval_node(*n.kids[0], x).scalar();
      const double b = eval_node(*n.kids[1], x).scalar();
      const double r = std::pow(a, b);
      if (!std::isfinite(r))
        throw DomainError("pow(" + std::to_string(a) + ", " + std::to_string(b) +
                          ") is not finite");
      return scalar_value(r);
    }
    case NodeKind::Sin:
      return scalar_value(std::sin(eval_node(*n.kids[0], x).scalar()));
    case NodeKind::Cos:
      return scalar_value(std::cos(eval_node(*n.kids[0], x).scalar()));
    case NodeKind::Exp:
      return scalar_value(std::exp(eval_node(*n.kids[0], x).scalar()));
    case NodeKind::Log: {
      const double a = eval_node(*n.kids[0], x).scalar();
      if (a <= 0.0) throw DomainError("log of non-positive value " + std::to_string(a));
      return scalar_value(std::log(a));
    }
    case NodeKind::Beta: {
      // Smooth extension: identically 0 left of the ramp, 1 right of it.
      const double t = eval_node(*n.kids[0], x).scalar();
      if (t <= kBetaLo) return scalar_value(0.0);
      if (t >= kBetaHi) return scalar_value(1.0);
      return scalar_value(beta_impl(t));
    }
    case NodeKind::BumpDeriv: {
      const double t = eval_node(*n.kids[0], x).scalar();
      return scalar_value(bump_raw_deriv(n.index, t) / bump_table().total);
    }
    case NodeKind::MatrixLit: {
      Eigen::MatrixXd m(n.shape.rows, n.shape.cols);
      for (int r = 0; r < n.shape.rows; ++r)
        for (int c = 0; c < n.shape.cols; ++c)
          m(r, c) = eval_node(*n.kids[static_cast<std::size_t>(r) * n.shape.cols + c], x).scalar();
      return as_value(n.shape, std::move(m));
    }
    case NodeKind::MExpChain: {
      const int d = n.shape.rows;
      const int k = static_cast<int>(n.kids.size()) - 1;
      // exp of the (k+1)x(k+1) block bidiagonal [[M,E1,..],[0,M,E2,..],...]
      // has the ordered derivative chain in its (1, k+1) block.
      Eigen::MatrixXd big = Eigen::MatrixXd::Zero(d * (k + 1), d * (k + 1));
      const Eigen::MatrixXd m = eval_node(*n.kids[0], x).data;
      for (int j = 0; j <= k; ++j) big.block(j * d, j * d, d, d) = m;
      for (int j = 1; j <= k; ++j)
        big.block((j - 1) * d, j * d, d, d) = eval_node(*n.kids[static_cast<std::size_t>(j)], x).data;
      const Eigen::MatrixXd e = detail::pade_exp(big);
      return as_value(n.shape, e.block(0, k * d, d, d));
    }
  }
  throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Symbolic differentiation
// ---------------------------------------------------------------------------

NodePtr zero_like(const Shape& s) {
  if (s.kind == ShapeKind::Scalar) return make_const(0.0);
  std::vector<NodePtr> elems(static_cast<std::size_t>(s.rows) * s.cols);
  for (auto& e : elems) e = make_const(0.0);
  return make_matrix_lit(s, std::move(elems));
}

NodePtr diff_node(const NodePtr& n, int i) {
  switch (n->kind) {
    case NodeKind::Const:
      return make_const(0.0);
    case NodeKind::Input:
      return make_const(n->index == i ? 1.0 : 0.0);
    case NodeKind::Neg:
      return make_neg(diff_node(n->kids[0], i));
    case NodeKind::Add:
      return make_add(NodeKind::Add, diff_node(n->kids[0], i), diff_node(n->kids[1], i));
    case NodeKind::Sub:
      return make_add(NodeKind::Sub, diff_node(n->kids[0], i), diff_node(n->kids[1], i));
    case NodeKind::Mul:
      return make_add(NodeKind::Add, make_mul(diff_node(n->kids[0], i), n->kids[1]),
                      make_mul(n->kids[0], diff_node(n->kids[1], i)));
    case NodeKind::Div: {
      // (f/g)' = f'/g - f*g'/g^2
      NodePtr f = n->kids[0], g = n->kids[1];
      NodePtr t1 = make_div(diff_node(f, i), g);
      NodePtr t2 = make_div(make_mul(f, diff_node(g, i)), make_mul(g, g));
      return make_add(NodeKind::Sub, t1, t2);
    }
    case NodeKind::Pow: {
      NodePtr f = n->kids[0], g = n->kids[1];
      if (g->kind == NodeKind::Const && g->value == std::floor(g->value)) {
        // integer exponent: n * f^(n-1) * f', valid for any base sign
        NodePtr fp = make_pow(f, make_const(g->value - 1.0));
        return make_mul(make_mul(make_const(g->value), fp), diff_node(f, i));
      }
      // general rule: f^g * (g' log f + g f'/f)
      NodePtr t1 = make_mul(diff_node(g, i), make_unary(NodeKind::Log, f, "log"));
      NodePtr t2 = make_mul(g, make_div(diff_node(f, i), f));
      return make_mul(make_pow(f, g), make_add(NodeKind::Add, t1, t2));
    }
    case NodeKind::Sin:
      return make_mul(make_unary(NodeKind::Cos, n->kids[0], "cos"), diff_node(n->kids[0], i));
    case NodeKind::Cos:
      return make_neg(
          make_mul(make_unary(NodeKind::Sin, n->kids[0], "sin"), diff_node(n->kids[0], i)));
    case NodeKind::Exp:
      return make_mul(make_unary(NodeKind::Exp, n->kids[0], "exp"), diff_node(n->kids[0], i));
    case NodeKind::Log:
      return make_div(diff_node(n->kids[0], i), n->kids[0]);
    case NodeKind::Beta:
      return make_mul(make_bump_deriv(0, n->kids[0]), diff_node(n->kids[0], i));
    case NodeKind::BumpDeriv:
      return make_mul(make_bump_deriv(n->index + 1, n->kids[0]), diff_node(n->kids[0], i));
    case NodeKind::MatrixLit: {
      std::vector<NodePtr> elems;
      elems.reserve(n->kids.size());
      for (const auto& k : n->kids) elems.push_back(diff_node(k, i));
      return make_matrix_lit(n->shape, std::move(elems));
    }
    case NodeKind::MExpChain: {
      // d Chain(M; E1..Ek) = sum_j Chain(M; E1..Ej, M', Ej+1..Ek)
      //                    + sum_j Chain(M; E1.., Ej', .., Ek)
      const auto& kids = n->kids;
      const int k = static_cast<int>(kids.size()) - 1;
      NodePtr md = diff_node(kids[0], i);
      NodePtr acc;
      for (int slot = 0; slot <= k; ++slot) {
        std::vector<NodePtr> nk;
        nk.push_back(kids[0]);
        for (int j = 1; j <= slot; ++j) nk.push_back(kids[static_cast<std::size_t>(j)]);
        nk.push_back(md);
        for (int j = slot + 1; j <= k; ++j) nk.push_back(kids[static_cast<std::size_t>(j)]);
        NodePtr term = make_mexp_chain(std::move(nk));
        acc = acc ? make_add(NodeKind::Add, acc, term) : term;
      }
      for (int j = 1; j <= k; ++j) {
        std::vector<NodePtr> nk = kids;
        nk[static_cast<std::size_t>(j)] = diff_node(kids[static_cast<std::size_t>(j)], i);
        acc = make_add(NodeKind::Add, acc, make_mexp_chain(std::move(nk)));
      }
      return acc;
    }
  }
  throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Printing (precedence-aware, round-trips through the parser)
// ---------------------------------------------------------------------------

int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub:
      return 1;
    case NodeKind::Mul:
    case NodeKind::Div:
      return 2;
    case NodeKind::Neg:
      return 3;
    case NodeKind::Pow:
      return 4;
    default:
      return 5;
  }
}

void print_node(const Node& n, std::ostream& os);

void print_child(const Node& parent, const Node& child, bool right, std::ostream& os) {
  const int pp = precedence(parent.kind), cp = precedence(child.kind);
  bool parens = cp < pp;
  // binary arithmetic is left associative (^ right associative); the right
  // operand is parenthesized at equal precedence so the tree shape survives
  if (cp == pp) {
    switch (parent.kind) {
      case NodeKind::Add:
      case NodeKind::Sub:
      case NodeKind::Mul:
      case NodeKind::Div:
        parens = right;
        break;
      case NodeKind::Pow:
        parens = !right;
        break;
      default:
        break;
    }
  }
  if (parens) os << '(';
  print_node(child, os);
  if (parens) os << ')';
}

void print_double(double v, std::ostream& os) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

void print_node(const Node& n, std::ostream& os) {
  switch (n.kind) {
    case NodeKind::Const:
      if (n.is_pi)
        os << "pi";
      else
        print_double(n.value, os);
      return;
    case NodeKind::Input:
      os << 'x' << n.index;
      return;
    case NodeKind::Neg:
      os << '-';
      print_child(n, *n.kids[0], false, os);
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
      print_child(n, *n.kids[0], false, os);
      os << (n.kind == NodeKind::Add ? " + " : " - ");
      print_child(n, *n.kids[1], true, os);
      return;
    case NodeKind::Mul:
    case NodeKind::Div:
      print_child(n, *n.kids[0], false, os);
      os << (n.kind == NodeKind::Mul ? "*" : "/");
      print_child(n, *n.kids[1], true, os);
      return;
    case NodeKind::Pow:
      print_child(n, *n.kids[0], false, os);
      os << '^';
      print_child(n, *n.kids[1], true, os);
      return;
    case NodeKind::Sin:
    case NodeKind::Cos:
    case NodeKind::Exp:
    case NodeKind::Log:
    case NodeKind::Beta: {
      const char* name = n.kind == NodeKind::Sin   ? "sin"
                         : n.kind == NodeKind::Cos ? "cos"
                         : n.kind == NodeKind::Exp ? "exp"
                         : n.kind == NodeKind::Log ? "log"
                                                   : "beta";
      os << name << '(';
      print_node(*n.kids[0], os);
      os << ')';
      return;
    }
    case NodeKind::BumpDeriv:
      os << "dbeta" << n.index << '(';
      print_node(*n.kids[0], os);
      os << ')';
      return;
    case NodeKind::MatrixLit: {
      os << '[';
      if (n.shape.kind == ShapeKind::Vector) {
        for (int r = 0; r < n.shape.rows; ++r) {
          if (r) os << ", ";
          print_node(*n.kids[static_cast<std::size_t>(r)], os);
        }
      } else {
        for (int r = 0; r < n.shape.rows; ++r) {
          if (r) os << ", ";
          os << '[';
          for (int c = 0; c < n.shape.cols; ++c) {
            if (c) os << ", ";
            print_node(*n.kids[static_cast<std::size_t>(r) * n.shape.cols + c], os);
          }
          os << ']';
        }
      }
      os << ']';
      return;
    }
    case NodeKind::MExpChain: {
      os << (n.kids.size() == 1 ? "mexp" : "mexpd") << '(';
      for (std::size_t j = 0; j < n.kids.size(); ++j) {
        if (j) os << ", ";
        print_node(*n.kids[j], os);
      }
      os << ')';
      return;
    }
  }
}

bool equal_node(const Node& a, const Node& b) {
  if (a.kind != b.kind || !(a.shape == b.shape)) return false;
  if (a.kind == NodeKind::Const && a.value != b.value) return false;
  if ((a.kind == NodeKind::Input || a.kind == NodeKind::BumpDeriv) && a.index != b.index)
    return false;
  if (a.kids.size() != b.kids.size()) return false;
  for (std::size_t j = 0; j < a.kids.size(); ++j)
    if (!equal_node(*a.kids[j], *b.kids[j])) return false;
  return true;
}

NodePtr subst_node(const NodePtr& n, const std::vector<ExprFn>& args) {
  switch (n->kind) {
    case NodeKind::Const:
      return n;
    case NodeKind::Input:
      return args[static_cast<std::size_t>(n->index)].root;
    default: {
      if (n->kids.empty()) return n;
      std::vector<NodePtr> nk;
      nk.reserve(n->kids.size());
      bool changed = false;
      for (const auto& k : n->kids) {
        NodePtr s = subst_node(k, args);
        changed = changed || s != k;
        nk.push_back(std::move(s));
      }
      if (!changed) return n;
      auto copy = std::make_shared<Node>(*n);
      copy->kids = std::move(nk);
      return copy;
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

ExprFn parse_expr(const std::string& src, int arity) {
  Parser p(src, arity);
  NodePtr root = p.parse_expr_rule();
  p.skip_ws();
  if (p.pos != src.size()) throw SyntaxError(p.pos, "trailing input");
  return ExprFn{arity, root->shape, root};
}

ExprFn parse_expr(const std::string& src, int arity, const Shape& expected) {
  ExprFn f = parse_expr(src, arity);
  if (!(f.shape == expected))
    throw ShapeError("expression has shape " + f.shape.str() + ", expected " + expected.str());
  return f;
}

Value eval(const ExprFn& f, const Eigen::VectorXd& point) {
  if (point.size() != f.arity)
    throw ArityError("eval: got " + std::to_string(point.size()) + " inputs, expected " +
                     std::to_string(f.arity));
  return eval_node(*f.root, point);
}

ExprFn diff(const ExprFn& f, int input_index) {
  if (input_index < 0 || input_index >= f.arity)
    throw ArityError("diff: input index " + std::to_string(input_index) + " out of range");
  NodePtr d = diff_node(f.root, input_index);
  return ExprFn{f.arity, d->shape, d};
}

std::string print(const ExprFn& f) {
  std::ostringstream os;
  print_node(*f.root, os);
  return os.str();
}

bool equal(const ExprFn& a, const ExprFn& b) {
  return a.arity == b.arity && a.shape == b.shape && equal_node(*a.root, *b.root);
}

ExprFn subst(const ExprFn& f, const std::vector<ExprFn>& args, int new_arity) {
  if (static_cast<int>(args.size()) != f.arity)
    throw ArityError("subst: need " + std::to_string(f.arity) + " replacement expressions");
  for (const auto& a : args) {
    if (a.arity != new_arity) throw ArityError("subst: replacement arity mismatch");
    if (!(a.shape == Shape::scalar())) throw ShapeError("subst: replacements must be scalar");
  }
  NodePtr root = subst_node(f.root, args);
  return ExprFn{new_arity, root->shape, root};
}

ExprFn const_fn(double c, int arity) { return ExprFn{arity, Shape::scalar(), make_const(c)}; }

ExprFn input_fn(int index, int arity) {
  if (index < 0 || index >= arity) throw ArityError("input_fn: index out of range");
  return ExprFn{arity, Shape::scalar(), make_input(index)};
}

ExprFn affine_input_fn(double scale, double shift, int arity, int index) {
  NodePtr n = make_add(NodeKind::Add, make_mul(make_const(scale), make_input(index)),
                       make_const(shift));
  return ExprFn{arity, Shape::scalar(), n};
}

ExprFn beta_expr() {
  NodePtr n = make_unary(NodeKind::Beta, make_input(0), "beta");
  return ExprFn{1, Shape::scalar(), n};
}

ExprFn fn_add(const ExprFn& a, const ExprFn& b) {
  if (a.arity != b.arity) throw ArityError("fn_add: arity mismatch");
  NodePtr n = make_add(NodeKind::Add, a.root, b.root);
  return ExprFn{a.arity, n->shape, n};
}

ExprFn fn_mul(const ExprFn& a, const ExprFn& b) {
  if (a.arity != b.arity) throw ArityError("fn_mul: arity mismatch");
  NodePtr n = make_mul(a.root, b.root);
  return ExprFn{a.arity, n->shape, n};
}

ExprFn fn_vector(const std::vector<ExprFn>& components) {
  if (components.empty()) throw ShapeError("fn_vector: no components");
  const int arity = components[0].arity;
  std::vector<NodePtr> kids;
  kids.reserve(components.size());
  for (const auto& c : components) {
    if (c.arity != arity) throw ArityError("fn_vector: arity mismatch");
    kids.push_back(c.root);
  }
  const int n = static_cast<int>(kids.size());
  NodePtr root = make_matrix_lit(Shape::vector(n), std::move(kids));
  return ExprFn{arity, root->shape, root};
}

ExprFn component(const ExprFn& f, int index) {
  if (f.shape.kind != ShapeKind::Vector)
    throw ShapeError("component: expression is not vector-valued");
  if (index < 0 || index >= f.shape.rows) throw ShapeError("component: index out of range");
  if (f.root->kind != NodeKind::MatrixLit)
    throw ShapeError("component: vector expression must be a coordinate-list literal");
  return ExprFn{f.arity, Shape::scalar(), f.root->kids[static_cast<std::size_t>(index)]};
}

}  // namespace holo::dsl
