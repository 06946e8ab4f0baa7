#include <cmath>
#include <random>

#include "curv3d/expr.hpp"
#include "doctest.h"

using namespace curv3d;
using namespace curv3d::expr;

namespace {

Expr random_tree(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 13);
  Expr x = Expr::symbol("x"), y = Expr::symbol("y");
  switch (pick(rng)) {
    case 0: return x;
    case 1: return y;
    case 2: return Expr(Rational(std::uniform_int_distribution<int>(-5, 5)(rng), 3));
    case 3: return random_tree(rng, depth - 1) + random_tree(rng, depth - 1);
    case 4: return random_tree(rng, depth - 1) - random_tree(rng, depth - 1);
    case 5: return random_tree(rng, depth - 1) * random_tree(rng, depth - 1);
    case 6: {
      Expr b = random_tree(rng, depth - 1);
      return random_tree(rng, depth - 1) / (Expr(2) + b * b);
    }
    case 7: return pow(random_tree(rng, depth - 1), std::uniform_int_distribution<int>(2, 3)(rng));
    case 8: return sin(random_tree(rng, depth - 1));
    case 9: return cos(random_tree(rng, depth - 1));
    case 10: return exp(sin(random_tree(rng, depth - 1)));
    case 11: {
      Expr a = random_tree(rng, depth - 1);
      return ln(Expr(1) + a * a);
    }
    case 12: {
      Expr a = random_tree(rng, depth - 1);
      return pow(Expr(1) + a * a, Rational(1, 2));
    }
    default: return -random_tree(rng, depth - 1);
  }
}

}  // namespace

TEST_CASE("parse and evaluate basic arithmetic") {
  Expr e = parse_expr("-(1) * t^2 + x");
  CHECK(evaluate_exact(e, Point{{"t", 2}, {"x", 1}}) == -3);
  CHECK(evaluate_exact(parse_expr("1/3 + 1/6"), Point{}) == Rational(1, 2));
  CHECK(evaluate_float(parse_expr("exp(0)"), Point{}) == 1.0);
  CHECK(evaluate_exact(parse_expr("exp(0)"), Point{}) == 1);
  CHECK(evaluate_exact(parse_expr("x^(-2)"), Point{{"x", 2}}) == Rational(1, 4));
  CHECK(evaluate_exact(parse_expr("x^(3/2)"), Point{{"x", 4}}) == 8);
  CHECK(evaluate_float(parse_expr("2.5e1"), Point{}) == 25.0);
}

TEST_CASE("evaluation errors carry the subtree") {
  Expr e = parse_expr("sinh(r)/r");
  try {
    evaluate_float(e, Point{{"r", 0}});
    FAIL("expected an error");
  } catch (const EvalError& err) {
    CHECK(err.reason() == EvalError::Reason::division_by_zero);
    CHECK(err.subtree() == "sinh(r)/r");
  }
  CHECK_THROWS_AS(evaluate_float(parse_expr("ln(x)"), Point{{"x", -1}}), EvalError);
  CHECK_THROWS_AS(evaluate_float(parse_expr("y"), Point{}), EvalError);
  CHECK_THROWS_AS(evaluate_exact(parse_expr("sin(x)"), Point{{"x", 1}}), EvalError);
}

TEST_CASE("parse errors report offsets") {
  try {
    parse_expr("x + * y");
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.offset() == 4);
  }
  SymbolTable table{{"r"}, {"H"}};
  CHECK_NOTHROW(parse_expr("H(r) + r", &table));
  CHECK_THROWS_AS(parse_expr("H(q)", &table), ParseError);
  CHECK_THROWS_AS(parse_expr("G(r)", &table), ParseError);
  CHECK_THROWS_AS(parse_expr("(x", &table), ParseError);
}

TEST_CASE("user functions bind and differentiate") {
  FunctionTable fns;
  fns["H"] = {{"r"}, parse_expr("r^2")};
  fns["D"] = {{"r"}, parse_expr("r")};
  Expr h = parse_expr("H(r)");
  CHECK(evaluate_float(h, Point{{"r", 3}}, &fns) == doctest::Approx(9.0));
  CHECK(evaluate_exact(bind_functions(h, fns), Point{{"r", 3}}) == 9);

  Expr q = parse_expr("H(r)/D(r)");
  Expr dq = differentiate(q, "r");
  for (double r : {0.3, 1.0, 2.7}) {
    double h6 = 1e-6;
    double fd = (evaluate_float(q, Point{{"r", r + h6}}, &fns) - evaluate_float(q, Point{{"r", r - h6}}, &fns)) /
                (2 * h6);
    double exact = evaluate_float(dq, Point{{"r", r}}, &fns);
    CHECK(std::abs(exact - 1.0) < 1e-12);
    CHECK(std::abs(fd - exact) / std::abs(exact) < 1e-6);
  }
  Expr formal = parse_expr("H''(r)");
  CHECK(formal.derivs()[0] == 2);
  CHECK(structurally_equal(differentiate(parse_expr("H'(r)"), "r"), formal));
  CHECK(evaluate_float(formal, Point{{"r", 5}}, &fns) == doctest::Approx(2.0));
}

TEST_CASE("derivative examples") {
  CHECK(evaluate_exact(differentiate(parse_expr("r^3"), "r"), Point{{"r", 2}}) == 12);
  CHECK(evaluate_exact(differentiate(parse_expr("sinh(r)"), "r"), Point{{"r", 0}}) == 1);
  double a = evaluate_float(differentiate(parse_expr("sinh(r)"), "r"), Point{{"r", 1.3}});
  double b = evaluate_float(parse_expr("cosh(r)"), Point{{"r", 1.3}});
  CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("print round-trips through the parser") {
  for (const char* text : {"-(1) * t^2 + x", "a - b - c", "a - (b - c)", "a/(b*c)", "(a*b)/c",
                           "-x^2", "(-x)^2", "x^(1/2) + y^(-3)", "H'(r)*D''(r)", "2/3*x - 7/5",
                           "-(a + b)*c", "sin(-x)^3", "exp(x)/-y"}) {
    Expr e = parse_expr(text);
    Expr again = parse_expr(to_string(e));
    CHECK_MESSAGE(structurally_equal(e, again), text << " -> " << to_string(e));
  }
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    Expr e = random_tree(rng, 5);
    CHECK(structurally_equal(e, parse_expr(to_string(e))));
  }
}

TEST_CASE("differentiation matches central differences on random trees") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  int checked = 0, attempts = 0;
  while (checked < 1000 && attempts < 20000) {
    ++attempts;
    Expr e = random_tree(rng, 6);
    Expr d = differentiate(e, "x");
    double x = coord(rng), y = coord(rng);
    const double h = 1e-5;
    double f0, fp, fm, dv;
    try {
      f0 = evaluate_float(e, Point{{"x", x}, {"y", y}});
      fp = evaluate_float(e, Point{{"x", x + h}, {"y", y}});
      fm = evaluate_float(e, Point{{"x", x - h}, {"y", y}});
      dv = evaluate_float(d, Point{{"x", x}, {"y", y}});
    } catch (const EvalError&) {
      continue;
    }
    if (std::abs(f0) > 1e4) continue;
    double fd = (fp - fm) / (2 * h);
    double scale = std::max({std::abs(dv), std::abs(f0), 1.0});
    CHECK(std::abs(fd - dv) / scale < 1e-6);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("differentiation is linear") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    Expr f = random_tree(rng, 4), g = random_tree(rng, 4);
    Expr lhs = differentiate(Expr(Rational(3, 2)) * f - Expr(2) * g, "x");
    Expr rhs = Expr(Rational(3, 2)) * differentiate(f, "x") - Expr(2) * differentiate(g, "x");
    Point p{{"x", 0.37}, {"y", -0.81}};
    double a = evaluate_float(lhs, p), b = evaluate_float(rhs, p);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("simplification preserves values") {
  std::mt19937_64 rng(9);
  Expr x = Expr::symbol("x"), y = Expr::symbol("y");
  Point exact{{"x", Rational(2, 7)}, {"y", Rational(-3, 5)}};
  for (int i = 0; i < 200; ++i) {
    Expr a = random_tree(rng, 3);
    Expr b = random_tree(rng, 3);
    // Identities that the constructors fold away.
    Expr e1 = (a + Expr(0)) * Expr(1) - Expr(0) * b;
    Expr e2 = pow(pow(a, 2), 3) / Expr(1);
    Expr e3 = a * a * a;
    Point pf{{"x", 0.41}, {"y", -0.23}};
    try {
      double va = evaluate_float(a, pf);
      CHECK(std::abs(evaluate_float(e1, pf) - va) <= 1e-12 * std::max(1.0, std::abs(va)));
      CHECK(std::abs(evaluate_float(e2, pf) - std::pow(va, 6)) <= 1e-12 * std::max(1.0, std::pow(va, 6)));
      CHECK(std::abs(evaluate_float(e3, pf) - va * va * va) <= 1e-12 * std::max(1.0, std::abs(va * va * va)));
    } catch (const EvalError&) {
    }
    try {
      Rational ra = evaluate_exact(a, exact);
      CHECK(evaluate_exact(e1, exact) == ra);
      CHECK(evaluate_exact(e3, exact) == ra * ra * ra);
      CHECK(std::abs(to_double(ra) - evaluate_float(a, Point{{"x", 2.0 / 7}, {"y", -0.6}})) <=
            1e-12 * std::max(1.0, std::abs(to_double(ra))));
    } catch (const EvalError&) {
    }
  }
  CHECK(structurally_equal(x * x, pow(x, 2)));
  CHECK(structurally_equal(Expr(0) * y + x, x));
}

TEST_CASE("points parse from text") {
  Point p = Point::parse("t=0, r=1, phi=1/2");
  CHECK(p.at("phi").exact());
  CHECK(p.at("phi").rational() == Rational(1, 2));
  CHECK(p.at("r").rational() == 1);
  CHECK(p.all_exact());
}

TEST_CASE("shared subtrees are counted once") {
  Expr x = Expr::symbol("x");
  Expr s = sin(x) + Expr(1);
  Expr e = s * s + s;
  CHECK(node_count(e) <= 6);
  auto vals = evaluate_many({e, s}, Point{{"x", 0.5}});
  CHECK(vals[1] == doctest::Approx(std::sin(0.5) + 1));
}
