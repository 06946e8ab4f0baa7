#include <cmath>
#include <random>

#include "curv3d/invariants.hpp"
#include "doctest.h"

using namespace curv3d;
using expr::Expr;
using expr::Point;

namespace {

Point txy(double t, double x, double y) {
  Point p;
  p.set("t", t);
  p.set("x", x);
  p.set("y", y);
  return p;
}

std::vector<FrameCurvature<double>> samples(std::uint64_t seed, int n, int max_d) {
  JetSampler s(seed, 2 + max_d);
  std::vector<FrameCurvature<double>> out;
  for (int i = 0; i < n; ++i) out.push_back(sample_curvature(s.next(), max_d));
  return out;
}

double value(const std::string& text, const FrameCurvature<double>& fc) { return evaluate(parse_invariant(text), fc); }

}  // namespace

TEST_CASE("parsing the index notation") {
  auto r = parse_invariant("R");
  REQUIRE(r.terms.size() == 1);
  CHECK(r.case_orders() == std::vector<int>{0});
  CHECK(r.terms[0].scheme.partner == std::vector<int>{1, 0});

  auto cubic = parse_invariant("R^{ab} R_a^{~c} R_{bc}");
  REQUIRE(cubic.terms.size() == 1);
  CHECK(cubic.case_orders() == std::vector<int>{0, 0, 0});
  CHECK(cubic.terms[0].scheme.connected());

  auto first = parse_invariant("R^{bc;d}R_{bc;d}");
  CHECK(first.case_orders() == std::vector<int>{1, 1});
  CHECK(first.max_derivative() == 1);

  CHECK_THROWS_WITH_AS(parse_invariant("R^{ab}"), doctest::Contains("free indices"), InvariantParseError);
  CHECK_THROWS_WITH_AS(parse_invariant("R_{ab}R^{ab}R_a^a"), doctest::Contains("appears"), InvariantParseError);
  CHECK_THROWS_WITH_AS(parse_invariant("Q_{ab}R^{ab}"), doctest::Contains("unknown tensor head"), InvariantParseError);
  CHECK_THROWS_AS(parse_invariant("R_{abc}R^{abc}"), InvariantParseError);
  CHECK_THROWS_AS(parse_invariant("R_{ab"), InvariantParseError);
  CHECK_THROWS_AS(parse_invariant(""), InvariantParseError);

  try {
    parse_invariant("R_{ab}X^{ab}");
  } catch (const InvariantParseError& e) {
    CHECK(e.offset() == 6);
  }
}

TEST_CASE("grouping braces, commas and empty groups") {
  auto a = parse_invariant("R^{;c}{R_c}^{e;f}{{R_e}^{h}}_{;f}R_{;h}");
  auto b = parse_invariant("R^{,c}R_c^{~e;f}R_e^{~h}{}_{;f}R_{,h}");
  REQUIRE(a.terms.size() == 1);
  REQUIRE(b.terms.size() == 1);
  CHECK(a.terms[0].scheme == b.terms[0].scheme);
}

TEST_CASE("enumeration sizes") {
  CHECK(enumerate_schemes({0}).size() == 1);
  CHECK(enumerate_schemes({0, 0}).size() == 2);
  CHECK(enumerate_schemes({0, 0, 0}).size() == 3);
  CHECK(enumerate_schemes({1, 1}).size() == 5);
  CHECK(enumerate_schemes({2}).size() == 2);
  CHECK_THROWS_AS(enumerate_schemes({1}), std::invalid_argument);
  CHECK(count_matchings({1, 1}) == 15);
  for (const auto& s : enumerate_schemes({0, 1, 1})) {
    CHECK(s.valid());
    CHECK(canonical(s) == s);
  }
}

TEST_CASE("canonical form is invariant under relabeling") {
  std::mt19937_64 rng(4);
  for (const auto& s : enumerate_schemes({0, 0, 1, 1})) {
    // Swap the two order-1 factors and flip the first Ricci pair.
    ContractionScheme t = s;
    int n = s.num_slots();
    std::vector<int> sigma(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) sigma[static_cast<std::size_t>(i)] = i;
    std::swap(sigma[0], sigma[1]);
    int o2 = s.offset(2), o3 = s.offset(3);
    for (int j = 0; j < 3; ++j) std::swap(sigma[static_cast<std::size_t>(o2 + j)], sigma[static_cast<std::size_t>(o3 + j)]);
    for (int i = 0; i < n; ++i)
      t.partner[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] = sigma[static_cast<std::size_t>(s.partner[static_cast<std::size_t>(i)])];
    CHECK(canonical(t) == s);
  }
}

TEST_CASE("printed schemes parse back to themselves") {
  for (auto c : std::vector<std::vector<int>>{{0}, {0, 0, 0}, {1, 1}, {0, 1, 1}, {2, 2}, {1, 3}}) {
    for (const auto& s : enumerate_schemes(c)) {
      auto inv = parse_invariant(s.to_string());
      REQUIRE(inv.terms.size() == 1);
      CHECK(inv.terms[0].coeff == 1);
      CHECK(inv.terms[0].scheme == s);
    }
  }
}

TEST_CASE("Riemann and trace-free heads expand through Ricci") {
  auto fcs = samples(17, 4, 1);
  for (const auto& fc : fcs) {
    double R = value("R", fc), RR = value("R_{ab}R^{ab}", fc);
    CHECK(value("R_{abcd}R^{abcd}", fc) == doctest::Approx(4 * RR - R * R).epsilon(1e-10));
    CHECK(value("S_{ab}S^{ab}", fc) == doctest::Approx(RR - R * R / 3).epsilon(1e-10));
    CHECK(value("R^{ab}_{ab}", fc) == doctest::Approx(R).epsilon(1e-12));
    CHECK(value("R_{abcd;e}R^{abcd;e}", fc) ==
          doctest::Approx(4 * value("R_{ab;c}R^{ab;c}", fc) - value("R_{;a}R^{;a}", fc)).epsilon(1e-10));
  }
  auto g = parse_invariant("g_a^{~a}");
  REQUIRE(g.terms.size() == 1);
  CHECK(g.terms[0].coeff == 3);
  CHECK(g.terms[0].scheme.orders.empty());
  CHECK(evaluate(g, fcs[0]) == doctest::Approx(3.0));
  CHECK(parse_invariant("R g_{ab;c}R^{ab;c}").terms.empty());
}

TEST_CASE("identity-related schemes agree in value") {
  auto fcs = samples(23, 4, 2);
  for (const auto& fc : fcs) {
    // Ricci symmetry.
    CHECK(value("R_{ab;c}R^{ba;c}", fc) == doctest::Approx(value("R_{ab;c}R^{ab;c}", fc)).epsilon(1e-12));
    // Contracted Bianchi identity and its derivative.
    CHECK(value("R_{ab}^{~~;b}R^{;a}", fc) == doctest::Approx(0.5 * value("R_{;a}R^{;a}", fc)).epsilon(1e-10));
    CHECK(value("R_{ab}^{;ba}", fc) == doctest::Approx(0.5 * value("R^{;a}_{;a}", fc)).epsilon(1e-10));
  }
}

TEST_CASE("evaluation on known metrics") {
  CHECK(evaluate_invariant(parse_invariant("R_{ab;c}R^{ab;c}"), MetricSpec::minkowski(), txy(0, 0, 0)) == 0.0);
  Expr r = Expr::symbol("r");
  Point p;
  p.set("t", 0.0);
  p.set("r", 1.0);
  p.set("phi", 0.0);
  CHECK(evaluate_invariant(parse_invariant("R"), MetricSpec::godel_like(r * r, r), p) == doctest::Approx(2.0));
  auto ds = MetricSpec::de_sitter(Rational(1, 3));
  Point q = txy(0.4, 0.1, 0.2);
  double R = evaluate_invariant(parse_invariant("R"), ds, q);
  CHECK(R == doctest::Approx(6.0 / 9.0));
  CHECK(evaluate_invariant(parse_invariant("R_{ab}R^{ab}"), ds, q) == doctest::Approx(R * R / 3));
  CHECK(std::abs(evaluate_invariant(parse_invariant("R_{ab;c}R^{ab;c}"), ds, q)) < 1e-12);
  EvalOptions cap;
  cap.derivative_cap = 1;
  CHECK_THROWS_AS(evaluate_invariant(parse_invariant("R^{;a}_{;a}"), ds, q, cap), std::invalid_argument);
}

TEST_CASE("invariant values do not depend on coordinates") {
  Expr t = Expr::symbol("t"), x = Expr::symbol("x"), y = Expr::symbol("y");
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> k(-3, 3);
  std::vector<Invariant> invs;
  for (auto c : std::vector<std::vector<int>>{{0, 0, 0}, {1, 1}, {0, 2}})
    for (const auto& s : enumerate_schemes(c)) invs.push_back(Invariant::from_scheme(s));
  int checked = 0;
  for (int trial = 0; trial < 4; ++trial) {
    MetricSpec g = MetricSpec::random_polynomial(100 + static_cast<std::uint64_t>(trial), 3);
    std::vector<Expr> phi{t + Expr(Rational(k(rng), 20)) * x * y, x + Expr(Rational(k(rng), 20)) * t * y,
                          y + Expr(Rational(k(rng), 20)) * t * x + Expr(Rational(k(rng), 30)) * y * y};
    MetricSpec h = pullback(g, phi);
    Point P = txy(0.05 * trial, -0.04, 0.03);
    Point p = txy(expr::evaluate_float(phi[0], P), expr::evaluate_float(phi[1], P), expr::evaluate_float(phi[2], P));
    auto a = frame_values(g, p, 2), b = frame_values(h, P, 2);
    for (std::size_t i = static_cast<std::size_t>(trial) % 2; i < invs.size(); i += 2) {
      double va = evaluate(invs[i], a), vb = evaluate(invs[i], b);
      CHECK(std::abs(va - vb) <= 1e-8 * std::max(1.0, std::abs(va)));
      ++checked;
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("jet-valued evaluation matches double evaluation") {
  MetricSpec g = MetricSpec::random_polynomial(7, 3);
  auto jc = jet_curvature(g, txy(0.1, 0.0, -0.1), 1, 1);
  auto fj = frame_jets(jc);
  auto fv = frame_values(jc);
  for (const auto& text : builtin_texts(BuiltinBasis::zeroth)) {
    auto inv = parse_invariant(text);
    CHECK(evaluate(inv, fj).value() == doctest::Approx(evaluate(inv, fv)).epsilon(1e-10));
  }
}

TEST_CASE("builtin bases") {
  CHECK(builtin_basis(BuiltinBasis::zeroth).size() == 3);
  auto first = builtin_basis(BuiltinBasis::first29);
  REQUIRE(first.size() == 29);
  for (std::size_t i = 0; i < first.size(); ++i)
    CHECK(first[i].case_orders() == (i < 3 ? std::vector<int>{1, 1} : std::vector<int>{1, 1, 1, 1}));
  auto fkwc = builtin_basis(BuiltinBasis::fkwc_rank0);
  REQUIRE(fkwc.size() == 14);
  int order6 = 0;
  for (const auto& inv : fkwc) order6 += inv.terms.front().scheme.order() == 6;
  CHECK(order6 == 10);
  CHECK(builtin_basis(BuiltinBasis::components).size() == 5);
  CHECK(builtin_from_name("first29") == BuiltinBasis::first29);
  CHECK_THROWS_AS(builtin_from_name("nope"), std::invalid_argument);
}

TEST_CASE("new invariants per case") {
  // Expected values come from the linear-rank oracle (frozen) and agree with
  // representation counting for [0,0,0,0] and [2,2].
  struct Row {
    std::vector<int> c;
    int n;
  };
  for (const auto& row : std::vector<Row>{{{0}, 1}, {{0, 0}, 1}, {{0, 0, 0}, 1}, {{0, 0, 0, 0}, 0}, {{1, 1}, 3},
                                          {{0, 1, 1}, 6}, {{2}, 1}, {{0, 2}, 2}, {{2, 2}, 5}}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      auto res = count_case(row.c, seed);
      CHECK(res.count == row.n);
      CHECK(res.strongest_dropped < 1e-10);
      if (res.count > 0) CHECK(res.weakest_kept > 1e-4);
    }
  }
}

TEST_CASE("deduplication against an explicit lower basis") {
  auto zeroth = builtin_basis(BuiltinBasis::zeroth);
  CHECK(dedup_and_count({0, 0, 0, 0}, zeroth, 5).count == 0);
  CHECK(dedup_and_count({0}, {}, 5).count == 1);
  CHECK(dedup_and_count({0, 0}, {zeroth[0]}, 5).count == 1);
  auto first = builtin_basis(BuiltinBasis::first29);
  std::vector<Invariant> lower{first[0], first[1], first[2]};
  auto r = dedup_and_count({1, 1, 1, 1}, lower, 5);
  CHECK(r.lower_rank == 6);
  CHECK(r.count == 12);
}

TEST_CASE("commutator cases") {
  CHECK(commutator_cases({1, 1}).empty());
  auto c = commutator_cases({2, 2});
  CHECK(c == std::vector<std::vector<int>>{{0, 0, 2}, {0, 1, 1}, {0, 0, 0, 0}});
}
