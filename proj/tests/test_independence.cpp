#include <algorithm>
#include <cmath>

#include "curv3d/counting.hpp"
#include "curv3d/frames.hpp"
#include "curv3d/independence.hpp"
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

std::vector<Point> cloud(int n) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back(txy(0.02 * i - 0.05, 0.03 * ((i * 7) % 5) - 0.06, 0.025 * ((i * 3) % 4) - 0.04));
  return pts;
}

std::vector<Point> radial(int n) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    Point p;
    p.set("t", 0.0);
    p.set("r", 0.5 + 0.05 * i);
    p.set("phi", 0.0);
    pts.push_back(p);
  }
  return pts;
}

std::vector<Invariant> parse_all(const std::vector<std::string>& texts) {
  std::vector<Invariant> out;
  for (const auto& t : texts) out.push_back(parse_invariant(t));
  return out;
}

std::vector<Invariant> first_order_span() {
  auto span = builtin_basis(BuiltinBasis::zeroth);
  for (const auto& c : std::vector<std::vector<int>>{{1, 1}, {0, 1, 1}, {0, 0, 1, 1}})
    for (const auto& s : enumerate_schemes(c)) span.push_back(Invariant::from_scheme(s));
  return span;
}

std::vector<std::string> godel_names() { return {GodelData::names().begin(), GodelData::names().end()}; }

}  // namespace

// ---------------------------------------------------------------- counting

TEST_CASE("closed-form counts") {
  const int expect[] = {3, 18, 45, 87, 147, 228};
  for (int p = 0; p <= 5; ++p) CHECK(count_independent(3, p) == expect[p]);
  CHECK(count_independent(4, 6) == 2094);
  CHECK(count_independent(2, 2) == 1);
  auto b = count_breakdown(2, 2);
  CHECK(b.special);
  auto c = count_breakdown(3, 1);
  CHECK(c.first - c.second + c.third == c.total);
  CHECK(c.total == 18);
}

TEST_CASE("counts grow strictly with derivative order") {
  for (int n = 2; n <= 6; ++n)
    for (int p = 0; p < 8; ++p) {
      if (n == 2 && p + 1 == 2) continue;
      CHECK(count_independent(n, p + 1) > count_independent(n, p));
    }
}

TEST_CASE("count domain errors") {
  CHECK_THROWS_AS(count_independent(1, 0), std::domain_error);
  CHECK_THROWS_AS(count_independent(3, -1), std::domain_error);
}

TEST_CASE("Karlhede bound") {
  CHECK(karlhede_bound(1, 3) == 5);
  CHECK(karlhede_bound(0, 3) == 4);
  CHECK(karlhede_bound(0, 4) == 5);
}

// ---------------------------------------------------------- Jacobian ranks

TEST_CASE("matrix rank with normalized rows") {
  Eigen::MatrixXd J(3, 4);
  J << 1, 2, 3, 4, 2e6, 4e6, 6e6, 8e6, 0, 1, 0, 1;
  auto r = matrix_rank(J, 1e-8);
  CHECK(r.rank == 2);
  CHECK(r.gap > 1e8);
  CHECK(matrix_rank(Eigen::MatrixXd::Zero(2, 3), 1e-8).rank == 0);
}

TEST_CASE("functional rank on explicit metrics") {
  auto zeroth = builtin_basis(BuiltinBasis::zeroth);
  CHECK(functional_rank(zeroth, MetricSpec::minkowski(), cloud(3)).rank == 0);
  CHECK(functional_rank(zeroth, MetricSpec::random_polynomial(3, 3), cloud(3)).rank == 3);
  Expr r = Expr::symbol("r");
  auto godel = MetricSpec::godel_like(expr::exp(r) + r * r * r, Expr(1) + r * r);
  auto fr = functional_rank(zeroth, godel, radial(4));
  CHECK(fr.rank == 1);
  auto gd = godel_cartan_invariants(expr::exp(r) + r * r * r, Expr(1) + r * r);
  CHECK(functional_rank(gd.list(), godel.coords, radial(4)).rank == 1);
  // Stencil derivatives agree with the exact ones.
  auto fam = invariant_family(MetricSpec::random_polynomial(3, 3), zeroth);
  CHECK(functional_rank(fam.eval, fam.coords, cloud(3)).rank == 3);
}

TEST_CASE("algebraic rank of simple sets") {
  auto samples = draw_jet_samples(5, 3, 2);
  CHECK(algebraic_rank(parse_all({"R", "R R", "R R R"}), samples).rank == 1);
  auto r = algebraic_rank(parse_all({"R", "S_{ab}S^{ab}", "S_a^{~b}S_b^{~c}S_c^{~a}"}), samples);
  CHECK(r.rank == 3);
  CHECK(r.stable);
  CHECK(algebraic_rank(builtin_basis(BuiltinBasis::zeroth), samples).rank == 3);
}

TEST_CASE("zeroth and first order span has eighteen independent scalars") {
  auto samples = draw_jet_samples(7, 3, 3);
  auto span = first_order_span();
  auto r = algebraic_rank(span, samples);
  CHECK(r.rank == 18);
  CHECK(r.rank <= count_independent(3, 1));
  CHECK(r.gap > 1e4);
  CHECK(r.stable);
}

TEST_CASE("pure first-order contractions miss the relative orientation") {
  // Products of nabla Ric alone see 15 - 3 directions beyond the three zeroth-order scalars.
  auto samples = draw_jet_samples(7, 3, 3);
  auto basis = builtin_basis(BuiltinBasis::zeroth);
  auto first = builtin_basis(BuiltinBasis::first29);
  basis.insert(basis.end(), first.begin(), first.end());
  auto r = algebraic_rank(basis, samples);
  CHECK(r.rank == 15);
  CHECK(r.gap > 1e4);
  auto f = filter_independent(basis, samples);
  CHECK(f.kept.size() == 15);
  CHECK(f.kept.size() <= 18);
}

TEST_CASE("greedy filtering") {
  auto samples = draw_jet_samples(3, 3, 2);
  auto set = parse_all({"R", "R R", "R_{ab}R^{ab}"});
  auto f = filter_independent(set, samples);
  CHECK(f.kept == std::vector<int>{0, 2});
  CHECK(f.dropped == std::vector<int>{1});
  CHECK(f.rank.rank == 2);
  CHECK(filter_independent(std::vector<Invariant>{}, samples).kept.empty());
  // Output size does not depend on the input order.
  auto bigger = parse_all({"R R", "R_{ab}R^{ab}", "R", "S_{ab}S^{ab}", "R^{ab}R_a^{~c}R_{bc}", "R R R"});
  auto g1 = filter_independent(bigger, samples);
  std::reverse(bigger.begin(), bigger.end());
  auto g2 = filter_independent(bigger, samples);
  CHECK(g1.kept.size() == 3);
  CHECK(g2.kept.size() == g1.kept.size());
}

TEST_CASE("frame scalars lose three directions to the Bianchi identities") {
  auto samples = draw_jet_samples(1, 5, 3, true);
  IndependenceOptions opt;
  std::vector<Eigen::MatrixXd> js;
  for (const auto& s : samples) js.push_back(jet_jacobian(cartan_function(), s, opt.jet_step));
  std::vector<int> zeroth{0, 1, 2}, first, all;
  for (int i = 0; i < 21; ++i) all.push_back(i);
  for (int i = 3; i < 21; ++i) first.push_back(i);
  auto ra = algebraic_rank(js, all, opt.fd_rel_tol);
  auto rz = algebraic_rank(js, zeroth, opt.fd_rel_tol);
  auto rf = algebraic_rank(js, first, opt.fd_rel_tol);
  CHECK(ra.rank == 18);
  CHECK(rz.rank == 3);
  CHECK(ra.rank - rz.rank == 15);
  // Alone the eighteen first-order scalars carry one relation.
  CHECK(rf.rank == 17);
  CHECK(ra.stable);
}

// ------------------------------------------------------------ Cartan filter

TEST_CASE("Cartan filter on constant curvature") {
  auto fam = invariant_family(MetricSpec::de_sitter(Rational(1, 2)), builtin_basis(BuiltinBasis::zeroth));
  auto pts = cloud(4);
  auto st = cartan_filter(fam, pts, polynomial_fit_oracle(fam, pts));
  CHECK(st.functional_rank == 0);
  CHECK(st.terminated);
  // R = 3/2, R_{ab}R^{ab} = 3/4 and the cubic trace 3/8 are distinct constants.
  CHECK(st.f_omega == std::vector<int>{0, 1, 2});
  CHECK(st.constants.size() == 3);
}

TEST_CASE("Cartan filter on Godel-like metrics") {
  Expr r = Expr::symbol("r");
  auto pts = radial(40);
  {
    auto gd = godel_cartan_invariants(r * r, r);
    auto fam = expression_family(godel_names(), gd.list(), {"t", "r", "phi"});
    auto st = cartan_filter(fam, pts, polynomial_fit_oracle(fam, pts));
    CHECK(st.functional_rank == 1);
    CHECK(st.q == 0);
    REQUIRE(st.f_omega.size() == 1);
    CHECK(st.names[static_cast<std::size_t>(st.f_omega[0])] == "I2");
  }
  std::vector<std::pair<Expr, Expr>> pairs{{expr::pow(expr::sinh(r), 2), expr::sinh(r) * expr::cosh(r)},
                                           {expr::exp(r) + r * r * r, Expr(1) + r * r}};
  for (const auto& [H, D] : pairs) {
    auto gd = godel_cartan_invariants(H, D);
    auto fam = expression_family(godel_names(), gd.list(), {"t", "r", "phi"});
    auto st = cartan_filter(fam, pts, polynomial_fit_oracle(fam, pts));
    CHECK(st.functional_rank <= 1);
    CHECK(st.terminated);
    CHECK(st.q <= 5);
    CHECK(st.f_omega.size() <= 6);
    CHECK(!st.f_omega.empty());
  }
}

TEST_CASE("polynomial relations among Godel invariants") {
  Expr r = Expr::symbol("r");
  auto gd = godel_cartan_invariants(expr::exp(r) + r * r * r, Expr(1) + r * r);
  auto fam = expression_family(godel_names(), gd.list(), {"t", "r", "phi"});
  auto dep = polynomial_fit_oracle(fam, radial(40));
  // I1 = 2/(1+r^2), I2 = 2r/(1+r^2): I2^2 = 2 I1 - I1^2.
  CHECK(dep({1}, 2));
  // I0 carries exp(r) and is transcendental over the others.
  for (int b = 1; b < 6; ++b) CHECK_FALSE(dep({b}, 0));
}

TEST_CASE("Cartan filter on a generic P-type I metric") {
  MetricSpec g;
  for (std::uint64_t seed = 1;; ++seed) {
    g = MetricSpec::random_polynomial(seed, 3);
    try {
      auto cf = canonicalize_ptype1(frame_point(g, txy(0, 0, 0)));
      double scale = std::max({std::abs(cf.mu[0]), std::abs(cf.mu[1]), std::abs(cf.mu[2])});
      if (cf.min_gap > 0.05 * scale) break;
    } catch (const FrameError&) {
    }
  }
  auto fam = cartan_family(g);
  auto oracle = jet_rank_oracle(cartan_function(), draw_jet_samples(11, 5, 3, true));
  auto st = cartan_filter(fam, cloud(6), oracle);
  REQUIRE(!st.levels.empty());
  CHECK(st.levels[0].chosen == std::vector<int>{0, 1, 2});
  CHECK(st.functional_rank == 3);
  CHECK(st.terminated);
  CHECK(st.q <= 5);
  CHECK(st.f_omega.size() == 18);
  FilterOptions four;
  four.four_at_first_level = true;
  auto st4 = cartan_filter(fam, cloud(6), oracle, four);
  REQUIRE(st4.levels.size() > 1);
  CHECK(st4.levels[1].chosen.size() <= 3);
}
