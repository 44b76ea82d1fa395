#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "holo/expr.hpp"

using namespace holo;
using namespace holo::dsl;

namespace {

Eigen::VectorXd pt(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double eval1(const ExprFn& f, std::initializer_list<double> xs) {
  return eval(f, pt(xs)).scalar();
}

// Independent derivative oracle: fourth-order central differences.
double central_diff(const ExprFn& f, const Eigen::VectorXd& p, int i, double h = 1e-5) {
  Eigen::VectorXd a = p, b = p;
  a[i] += h;
  b[i] -= h;
  return (eval(f, a).scalar() - eval(f, b).scalar()) / (2 * h);
}

// Small random expression generator for the property tests.  Produces
// strings so that the parser itself is part of what gets exercised.
struct ExprGen {
  std::mt19937_64 rng;
  int arity;

  ExprGen(std::uint64_t seed, int arity) : rng(seed), arity(arity) {}

  double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
  }
  int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

  std::string gen(int depth) {
    if (depth <= 0) {
      if (pick(2) == 0) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", uniform(0.3, 2.0));
        return buf;
      }
      return "x" + std::to_string(pick(arity));
    }
    switch (pick(8)) {
      case 0:
        return "(" + gen(depth - 1) + " + " + gen(depth - 1) + ")";
      case 1:
        return "(" + gen(depth - 1) + " - " + gen(depth - 1) + ")";
      case 2:
        return gen(depth - 1) + "*" + gen(depth - 1);
      case 3:
        // keep the divisor away from zero
        return gen(depth - 1) + "/(1.5 + cos(" + gen(depth - 1) + ")^2)";
      case 4:
        return "sin(" + gen(depth - 1) + ")";
      case 5:
        return "cos(" + gen(depth - 1) + ")";
      case 6:
        return "exp(0.3*" + gen(depth - 1) + ")";
      case 7:
        return pick(2) == 0 ? "log(2 + " + gen(depth - 1) + "^2)"
                            : "beta(0.4 + 0.2*" + gen(depth - 1) + ")";
    }
    return "x0";
  }
};

}  // namespace

TEST_CASE("parse and evaluate the documented examples") {
  auto f = parse_expr("sin(x0)*x1", 2, Shape::scalar());
  CHECK(eval1(f, {M_PI / 2, 3.0}) == doctest::Approx(3.0).epsilon(1e-14));

  CHECK(eval1(parse_expr("exp(x0)", 1), {0.0}) == doctest::Approx(1.0));
  CHECK(eval1(parse_expr("cos(x0)^2 + sin(x0)^2", 1), {0.7}) ==
        doctest::Approx(1.0).epsilon(1e-14));

  auto m = parse_expr("[[0, -x0],[x0, 0]]", 1, Shape::matrix(2, 2));
  const Value v = eval(m, pt({1.0}));
  CHECK(v.data(0, 1) == -1.0);
  CHECK(v.data(1, 0) == 1.0);
  CHECK(v.data(0, 0) == 0.0);
}

TEST_CASE("syntax and shape errors carry positions") {
  CHECK_THROWS_AS(parse_expr("x0 +", 1), SyntaxError);
  try {
    parse_expr("x0 +", 1);
  } catch (const SyntaxError& e) {
    CHECK(e.offset == 4);
  }
  CHECK_THROWS_AS(parse_expr("x7", 2), ArityError);
  CHECK_THROWS_AS(parse_expr("[[x0, 1],[x0]]", 1), ShapeError);
  CHECK_THROWS_AS(parse_expr("[[1,0],[0,1]] + x0", 1), ShapeError);
  CHECK_THROWS_AS(parse_expr("sin(x0)", 1, Shape::vector(2)), ShapeError);
}

TEST_CASE("evaluation domain errors") {
  CHECK_THROWS_AS(eval1(parse_expr("x0/x1", 2), {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(eval1(parse_expr("log(x0)", 1), {-1.0}), DomainError);
  CHECK_THROWS_AS(eval1(parse_expr("log(x0)", 1), {0.0}), DomainError);
}

TEST_CASE("derivatives of the documented examples") {
  auto f = parse_expr("x0*x1", 2);
  auto d = diff(f, 0);
  for (double a : {0.0, 1.3, -2.0})
    CHECK(eval1(d, {a, 0.37}) == doctest::Approx(0.37).epsilon(1e-15));

  auto s = diff(parse_expr("sin(x0)", 1), 0);
  CHECK(eval1(s, {M_PI}) == doctest::Approx(-1.0).epsilon(1e-12));

  auto m = diff(parse_expr("[[0, -x0],[x0, 0]]", 1), 0);
  const Value v = eval(m, pt({0.42}));
  CHECK(v.data(0, 1) == -1.0);
  CHECK(v.data(1, 0) == 1.0);
}

TEST_CASE("derivatives agree with central differences on random expressions") {
  ExprGen gen(20240801, 2);
  int done = 0;
  while (done < 100) {
    const std::string src = gen.gen(3);
    ExprFn f;
    try {
      f = parse_expr(src, 2, Shape::scalar());
    } catch (const Error&) {
      continue;
    }
    const Eigen::VectorXd p = pt({gen.uniform(0.2, 0.8), gen.uniform(0.2, 0.8)});
    const int i = gen.pick(2);
    double exact = 0, approx = 0, value = 0;
    try {
      value = eval(f, p).scalar();
      exact = eval(diff(f, i), p).scalar();
      approx = central_diff(f, p, i);
    } catch (const DomainError&) {
      continue;
    }
    CHECK(std::abs(exact - approx) <= 1e-6 * (1.0 + std::abs(value)));
    ++done;
  }
}

TEST_CASE("print/parse round trip is the identity on the AST") {
  const std::vector<std::string> srcs = {
      "sin(x0)*x1 + cos(x1)^2",
      "-x0^2 - -x1",
      "x0 - x1 - 2",
      "x0/(x1/3)",
      "2^x0^2",
      "[[0, -x0],[x0, 0]]",
      "[x0, sin(x0), 3]",
      "mexp([[0, -x0],[x0, 0]])*[1, 0]",
      "beta(x0)*pi",
      "(x0 + x1)*(x0 - x1)",
  };
  for (const auto& src : srcs) {
    const ExprFn f = parse_expr(src, 2);
    const ExprFn g = parse_expr(print(f), 2);
    CHECK_MESSAGE(equal(f, g), "round trip failed for: ", src, " printed as: ", print(f));
  }

  ExprGen gen(7, 3);
  for (int k = 0; k < 60; ++k) {
    const std::string src = gen.gen(3);
    ExprFn f;
    try {
      f = parse_expr(src, 3);
    } catch (const Error&) {
      continue;
    }
    CHECK_MESSAGE(equal(f, parse_expr(print(f), 3)), "random round trip failed: ", print(f));
  }

  // derivatives introduce dbeta<k> and mexpd; those must round trip too
  const ExprFn b2 = diff(diff(parse_expr("beta(x0*x0)", 1), 0), 0);
  CHECK(equal(b2, parse_expr(print(b2), 1)));
  const ExprFn m2 = diff(parse_expr("mexp([[0, -x0],[x0, 0]])", 1), 0);
  CHECK(equal(m2, parse_expr(print(m2), 1)));
}

TEST_CASE("repeated evaluation is bit-identical") {
  const ExprFn f = parse_expr("sin(x0)*exp(0.3*x1) + beta(x0)/(1.5 + x1^2)", 2);
  const Eigen::VectorXd p = pt({0.6180339887, 0.4142135623});
  const double first = eval(f, p).scalar();
  for (int i = 0; i < 10; ++i) CHECK(eval(f, p).scalar() == first);
}

TEST_CASE("beta has the pinned flat zones and is monotone") {
  CHECK(beta(0.0) == 0.0);
  CHECK(beta(0.05) == 0.0);
  CHECK(beta(0.1) == 0.0);
  CHECK(beta(0.9) == 1.0);
  CHECK(beta(0.95) == 1.0);
  CHECK(beta(1.0) == 1.0);
  CHECK(beta(0.5) == doctest::Approx(0.5).epsilon(1e-13));  // bump is symmetric

  CHECK_THROWS_AS(beta(-0.1), OutOfRange);
  CHECK_THROWS_AS(beta(1.1), OutOfRange);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    CHECK(beta(a) <= beta(b) + 1e-15);
  }
}

TEST_CASE("beta is C^1 at the flat-zone boundaries") {
  // finite-difference derivative should approach the closed-form derivative
  // continuously across 0.1 and 0.9
  const double h = 1e-6;
  for (double t : {0.1 - 5e-7, 0.1 + 5e-7, 0.9 - 5e-7, 0.9 + 5e-7, 0.3, 0.5, 0.7}) {
    const double fd = (beta(t + h) - beta(t - h)) / (2 * h);
    CHECK(std::abs(fd - beta_deriv(t)) <= 1e-6 * (1.0 + std::abs(fd)));
  }
}

TEST_CASE("symbolic beta derivative matches quadrature-free closed form") {
  const ExprFn b = beta_expr();
  const ExprFn db = diff(b, 0);
  for (double t : {0.15, 0.3, 0.52, 0.77, 0.89}) {
    CHECK(eval(db, pt({t})).scalar() == doctest::Approx(beta_deriv(t)).epsilon(1e-12));
    const double fd = (beta(t + 1e-6) - beta(t - 1e-6)) / 2e-6;
    CHECK(eval(db, pt({t})).scalar() == doctest::Approx(fd).epsilon(1e-5));
  }
  // second derivative via another diff, against finite differences of dbeta
  const ExprFn ddb = diff(db, 0);
  for (double t : {0.2, 0.5, 0.8}) {
    const double fd = (beta_deriv(t + 1e-6) - beta_deriv(t - 1e-6)) / 2e-6;
    CHECK(eval(ddb, pt({t})).scalar() == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("matrix exponential chain rule against the rotation closed form") {
  // mexp([[0,-x],[x,0]]) is rotation by x; its x-derivative is J * rot(x)
  const ExprFn rot = parse_expr("mexp([[0, -x0],[x0, 0]])", 1);
  const ExprFn drot = diff(rot, 0);
  const ExprFn ddrot = diff(drot, 0);
  for (double x : {0.0, 0.3, 1.2, -2.0}) {
    const Eigen::MatrixXd r = eval(rot, pt({x})).data;
    CHECK(r(0, 0) == doctest::Approx(std::cos(x)).epsilon(1e-13));
    CHECK(r(1, 0) == doctest::Approx(std::sin(x)).epsilon(1e-13));
    const Eigen::MatrixXd d = eval(drot, pt({x})).data;
    CHECK(d(0, 0) == doctest::Approx(-std::sin(x)).epsilon(1e-12));
    CHECK(d(1, 0) == doctest::Approx(std::cos(x)).epsilon(1e-12));
    const Eigen::MatrixXd dd = eval(ddrot, pt({x})).data;
    CHECK(dd(0, 0) == doctest::Approx(-std::cos(x)).epsilon(1e-11));
  }

  // non-commuting case: finite differences as the oracle
  const ExprFn f =
      parse_expr("mexp([[0, -x0, 0],[x0, 0, -2*x0],[0, 2*x0, 0]]*[[1,0,0],[0,1,0],[0,0,1]])", 1);
  const ExprFn df = diff(f, 0);
  const double h = 1e-6;
  const Eigen::MatrixXd fd =
      (eval(f, pt({0.7 + h})).data - eval(f, pt({0.7 - h})).data) / (2 * h);
  const Eigen::MatrixXd ex = eval(df, pt({0.7})).data;
  CHECK((fd - ex).norm() <= 1e-8);
}

TEST_CASE("substitution composes expressions exactly") {
  // f(t) = sin(t), substitute t := 2 t' - 1
  const ExprFn f = parse_expr("sin(x0)", 1);
  const ExprFn sub = subst(f, {affine_input_fn(2.0, -1.0, 1)}, 1);
  CHECK(eval1(sub, {0.75}) == doctest::Approx(std::sin(0.5)).epsilon(1e-15));

  // vector-valued segment composed with a rescaling
  const ExprFn seg = parse_expr("[x0, x0^2]", 1);
  const ExprFn seg2 = subst(seg, {affine_input_fn(0.5, 0.25, 2, 1)}, 2);
  const Value v = eval(seg2, pt({9.0, 0.5}));
  CHECK(v.data(0, 0) == doctest::Approx(0.5));
  CHECK(v.data(1, 0) == doctest::Approx(0.25));
}
