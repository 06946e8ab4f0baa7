// One line per acceptance criterion: PASS/FAIL, the evidence, and the runtime.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "curv3d/classify.hpp"
#include "curv3d/counting.hpp"
#include "curv3d/frames.hpp"
#include "curv3d/independence.hpp"
#include "curv3d/invariants.hpp"

using namespace curv3d;
using expr::Expr;
using expr::Point;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& run) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s | %s | %.2f s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

Point txy(double t, double x, double y) {
  Point p;
  p.set("t", t);
  p.set("x", x);
  p.set("y", y);
  return p;
}

/// Random polynomial metrics whose Ricci operator has well separated real eigenvalues at the origin.
std::vector<std::pair<MetricSpec, CanonicalFrame>> ptype1_metrics(int count) {
  std::vector<std::pair<MetricSpec, CanonicalFrame>> out;
  for (std::uint64_t seed = 1; static_cast<int>(out.size()) < count; ++seed) {
    auto g = MetricSpec::random_polynomial(seed, 3);
    try {
      auto cf = canonicalize_ptype1(frame_point(g, txy(0, 0, 0)));
      double scale = std::max({std::abs(cf.mu[0]), std::abs(cf.mu[1]), std::abs(cf.mu[2])});
      if (cf.min_gap > 0.05 * scale) out.emplace_back(g, cf);
    } catch (const FrameError&) {
    }
  }
  return out;
}

// ------------------------------------------------------------ criteria

Outcome counting() {
  const int expect[] = {3, 18, 45, 87, 147, 228};
  bool ok = true;
  std::string got = "N(3,0..5)=";
  for (int p = 0; p <= 5; ++p) {
    auto v = count_independent(3, p);
    ok = ok && v == expect[p];
    got += v.str() + (p < 5 ? "," : "");
  }
  auto n46 = count_independent(4, 6), n22 = count_independent(2, 2), n31 = count_independent(3, 1);
  ok = ok && n46 == 2094 && n22 == 1 && n31 == 18;
  got += " N(4,6)=" + n46.str() + " N(2,2)=" + n22.str() + " N(3,1)=" + n31.str();
  return {ok, got};
}

Outcome karlhede() {
  int a = karlhede_bound(1, 3), b = karlhede_bound(0, 3);
  return {a == 5 && b == 4, "q(1,3)=" + std::to_string(a) + " q(0,3)=" + std::to_string(b)};
}

Outcome per_case() {
  const std::vector<std::pair<std::vector<int>, int>> rows{
      {{0}, 1},          {{0, 0}, 1},         {{0, 0, 0}, 1}, {{0, 0, 0, 0}, 0}, {{0, 0, 0, 0, 0}, 0},
      {{1, 1}, 3},       {{0, 1, 1}, 18},     {{0, 0, 1, 1}, 15}, {{0, 0, 0, 1, 1}, 21}, {{1, 1, 1, 1}, 26},
      {{2}, 1},          {{0, 2}, 2},         {{2, 2}, 6}};
  bool ok = true;
  std::string detail, missed;
  for (const auto& [orders, target] : rows) {
    std::vector<int> counts;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) counts.push_back(count_case(orders, seed).count);
    bool stable = std::all_of(counts.begin(), counts.end(), [&](int c) { return c == counts[0]; });
    std::string name = "[";
    for (std::size_t i = 0; i < orders.size(); ++i) name += std::to_string(orders[i]) + (i + 1 < orders.size() ? "," : "]");
    std::string entry = name + std::to_string(counts[0]) + (stable ? "" : "*");
    detail += entry + " ";
    if (!stable || counts[0] != target) {
      ok = false;
      missed += name + " got " + std::to_string(counts[0]) + " want " + std::to_string(target) + "; ";
    }
  }
  if (!ok) detail += "| mismatched: " + missed + "the reference counts exceed the number of linearly independent new values in 3D";
  return {ok, detail};
}

Outcome godel() {
  Expr r = Expr::symbol("r");
  std::vector<std::pair<Expr, Expr>> pairs{{r * r, r},
                                           {expr::pow(expr::sinh(r), 2), expr::sinh(r) * expr::cosh(r)},
                                           {expr::exp(r) + r * r * r, Expr(1) + r * r}};
  std::vector<double> rs;
  for (int i = 0; i < 20; ++i) rs.push_back(0.3 + 0.1 * i);
  double worst = 0;
  int n = 0;
  for (const auto& [H, D] : pairs) {
    auto rep = verify_godel_relations(H, D, rs);
    worst = std::max(worst, rep.max_residual);
    n += static_cast<int>(rep.samples.size());
  }
  return {worst < 1e-9 && n == 60, std::to_string(n) + " samples, max residual " + fmt(worst)};
}

Outcome sci0() {
  auto ss = parse_invariant("S_{ab}S^{ab}");
  auto s3 = parse_invariant("S_a^{~b}S_b^{~c}S_c^{~a}");
  double lit = 0, cor = 0;
  for (const auto& [g, cf] : ptype1_metrics(5)) {
    double a = evaluate(ss, cf.fp.fc), b = evaluate(s3, cf.fp.fc);
    const auto& P = cf.psi;
    double q2 = 3 * P.psi2 * P.psi2 + P.psi0 * P.psi0;
    double q3 = -P.psi2 * P.psi2 * P.psi2 + P.psi2 * P.psi0 * P.psi0;
    lit = std::max({lit, rel(a, q2), rel(b, q3)});
    cor = std::max({cor, rel(a, 2 * q2), rel(b, -6 * q3)});
  }
  return {lit < 1e-9, "as stated: max rel residual " + fmt(lit) + "; with factors 2 and -6: " + fmt(cor) +
                          " (the stated pair has the wrong ratio for any triad normalization)"};
}

Outcome frame_rank() {
  std::vector<int> all, zeroth{0, 1, 2}, first;
  for (int i = 0; i < 21; ++i) all.push_back(i);
  for (int i = 3; i < 21; ++i) first.push_back(i);
  IndependenceOptions opt;
  std::map<int, int> votes_first, votes_rel;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto samples = draw_jet_samples(seed, 1, 3, true);
    std::vector<Eigen::MatrixXd> js{jet_jacobian(cartan_function(), samples[0], opt.jet_step)};
    int rf = algebraic_rank(js, first, opt.fd_rel_tol).rank;
    int ra = algebraic_rank(js, all, opt.fd_rel_tol).rank;
    int rz = algebraic_rank(js, zeroth, opt.fd_rel_tol).rank;
    ++votes_first[rf];
    ++votes_rel[ra - rz];
    per_seed += std::to_string(rf) + "/" + std::to_string(ra) + " ";
  }
  auto majority = [](const std::map<int, int>& v) {
    return std::max_element(v.begin(), v.end(), [](auto& a, auto& b) { return a.second < b.second; })->first;
  };
  int rf = majority(votes_first), rrel = majority(votes_rel);
  return {rf == 15, "rank of the 18 frame scalars " + std::to_string(rf) + " (want 15); with R, Psi0, Psi2 added the 21 have rank " +
                        std::to_string(rrel + 3) + ", so the 18 add " + std::to_string(rrel) +
                        " beyond zeroth order; per seed 18/21: " + per_seed};
}

Outcome first_order() {
  double worst = 0, worst_r = 0;
  auto rb2 = parse_invariant("R_{ab;c}R^{ab;c}"), rb3 = parse_invariant("R_{ab;c}R^{ac;b}"),
       rb4 = parse_invariant("R^a_{~b;a}R^{;b}");
  for (const auto& [g, cf] : ptype1_metrics(5)) {
    auto np = np_first_order_invariants(cf);
    Point o = txy(0, 0, 0);
    std::array<double, 4> tensor{evaluate_invariant(parse_invariant("R_{;a}R^{;a}"), g, o),
                                 0.25 * evaluate_invariant(parse_invariant("S_{ab;c}S^{ab;c}"), g, o),
                                 0.5 * evaluate_invariant(parse_invariant("S_{ab;c}S^{ac;b}"), g, o),
                                 evaluate_invariant(parse_invariant("S^a_{~b;a}R^{;b}"), g, o)};
    for (int k = 0; k < 4; ++k) worst = std::max(worst, rel(np[static_cast<std::size_t>(k)], tensor[static_cast<std::size_t>(k)]));
    // Ricci-based forms differ by fixed multiples of R_{;a}R^{;a}.
    double r1 = tensor[0];
    worst_r = std::max({worst_r, rel(0.25 * evaluate_invariant(rb2, g, o), np[1] + r1 / 12),
                        rel(0.5 * evaluate_invariant(rb3, g, o), np[2] + r1 / 9),
                        rel(evaluate_invariant(rb4, g, o), np[3] + r1 / 3)});
  }
  return {worst < 1e-9, "R1..R4 frame vs tensor (trace-free Ricci) max rel residual " + fmt(worst) +
                            "; Ricci forms with +R1/12, +R1/9, +R1/3: " + fmt(worst_r)};
}

double generalized_delta(const std::array<Eigen::Matrix3d, 4>& M) {
  std::array<int, 4> perm{0, 1, 2, 3};
  double total = 0;
  do {
    int inv = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)]) ++inv;
    double sign = inv % 2 ? -1 : 1;
    for (int idx = 0; idx < 81; ++idx) {
      std::array<int, 4> a{idx % 3, idx / 3 % 3, idx / 9 % 3, idx / 27};
      double term = sign;
      for (std::size_t i = 0; i < 4; ++i) term *= M[i](a[i], a[static_cast<std::size_t>(perm[i])]);
      total += term;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

Outcome properties() {
  std::ostringstream out;
  bool ok = true;

  // Chart independence of invariant values.
  Expr t = Expr::symbol("t"), x = Expr::symbol("x"), y = Expr::symbol("y");
  std::vector<Invariant> invs;
  for (auto c : std::vector<std::vector<int>>{{0, 0, 0}, {1, 1}, {0, 2}, {0, 1, 1}})
    for (const auto& s : enumerate_schemes(c)) invs.push_back(Invariant::from_scheme(s));
  double diffeo = 0;
  for (int trial = 0; trial < 3; ++trial) {
    MetricSpec g = MetricSpec::random_polynomial(200 + static_cast<std::uint64_t>(trial), 3);
    std::vector<Expr> phi{t + Expr(Rational(1, 10)) * x * y, x + Expr(Rational(trial + 1, 12)) * t * t,
                          y - Expr(Rational(1, 9)) * x * t + Expr(Rational(1, 20)) * y * y};
    MetricSpec h = pullback(g, phi);
    Point P = txy(0.05, -0.04 * trial, 0.03);
    Point p = txy(expr::evaluate_float(phi[0], P), expr::evaluate_float(phi[1], P), expr::evaluate_float(phi[2], P));
    auto a = frame_values(g, p, 2), b = frame_values(h, P, 2);
    for (const auto& inv : invs) {
      double va = evaluate(inv, a), vb = evaluate(inv, b);
      diffeo = std::max(diffeo, std::abs(va - vb) / std::max(1.0, std::abs(va)));
    }
  }
  ok = ok && diffeo < 1e-8;
  out << "diffeo " << fmt(diffeo);

  // Curvature identities on random jets.
  double anti = 0, cyc = 0, bianchi = 0, contracted = 0, commutator = 0, from_ricci = 0;
  JetSampler sampler(41, 5);
  auto deriv = [](const Jet& j, int v) { return j.derivative(v); };
  for (int k = 0; k < 3; ++k) {
    auto g = sampler.next().metric();
    auto c = jet_curvature(g, 2);
    auto R = values(c.riemann_up);
    double scale = 1;
    for (double v : R.data()) scale = std::max(scale, std::abs(v));
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int cc = 0; cc < 3; ++cc)
          for (int d = 0; d < 3; ++d) {
            anti = std::max(anti, std::abs(R({a, b, cc, d}) + R({a, b, d, cc})) / scale);
            cyc = std::max(cyc, std::abs(R({a, b, cc, d}) + R({a, cc, d, b}) + R({a, d, b, cc})) / scale);
          }
    auto dR = values(talg::covariant_derivative(c.riemann_up, c.gamma, deriv));
    double dscale = 1;
    for (double v : dR.data()) dscale = std::max(dscale, std::abs(v));
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int cc = 0; cc < 3; ++cc)
          for (int d = 0; d < 3; ++d)
            for (int e = 0; e < 3; ++e)
              bianchi = std::max(
                  bianchi, std::abs(dR({a, b, cc, d, e}) + dR({a, b, d, e, cc}) + dR({a, b, e, cc, d})) / dscale);
    auto ginv = values(c.ginv);
    auto dRic = values(c.nabla[1]);
    for (int b = 0; b < 3; ++b) {
      double lhs = 0;
      for (int a = 0; a < 3; ++a)
        for (int cc = 0; cc < 3; ++cc) lhs += ginv({a, cc}) * dRic({a, b, cc});
      contracted = std::max(contracted, std::abs(lhs - 0.5 * c.scalar.gradient(b)) / dscale);
    }
    // Ricci identity: V_{b;cd} - V_{b;dc} = R^a_{bcd} V_a.
    auto space = g[0].space_ptr();
    Tensor<Jet> V(3, {Variance::covariant}, Jet(space, 0.0));
    for (int a = 0; a < 3; ++a) V({a}) = Jet::variable(space, (a + 1) % 3, 0.0) * Jet(space, 0.5 + a) + Jet(space, 1.0 - a);
    auto ddV = values(talg::covariant_derivative(talg::covariant_derivative(V, c.gamma, deriv), c.gamma, deriv));
    auto Vv = values(V);
    for (int b = 0; b < 3; ++b)
      for (int cc = 0; cc < 3; ++cc)
        for (int d = 0; d < 3; ++d) {
          double rhs = 0;
          for (int a = 0; a < 3; ++a) rhs += R({a, b, cc, d}) * Vv({a});
          commutator = std::max(commutator, std::abs(ddV({b, cc, d}) - ddV({b, d, cc}) - rhs) / scale);
        }
    auto Rl = values(talg::lower_index(c.riemann_up, c.g, 0));
    auto fr = values(talg::riemann_from_ricci(c.g, c.ricci, c.scalar));
    for (std::size_t i = 0; i < Rl.size(); ++i) from_ricci = std::max(from_ricci, std::abs(Rl[i] - fr[i]) / scale);
  }
  // The symbolic pipeline on an explicit chart.
  {
    SymbolicCurvature sc(MetricSpec::random_polynomial(5, 2));
    auto Rl = sc.riemann_lower().evaluate(txy(0.1, -0.05, 0.08));
    auto fr = sc.riemann_from_ricci().evaluate(txy(0.1, -0.05, 0.08));
    double scale = 1;
    for (double v : Rl.data()) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < Rl.size(); ++i) from_ricci = std::max(from_ricci, std::abs(Rl[i] - fr[i]) / scale);
  }
  double id_worst = std::max({anti, cyc, bianchi, contracted, commutator});
  ok = ok && id_worst < 1e-9 && from_ricci < 1e-9;
  out << ", antisym " << fmt(anti) << ", cyclic " << fmt(cyc) << ", Bianchi " << fmt(bianchi) << ", contracted "
      << fmt(contracted) << ", commutator " << fmt(commutator) << ", Riemann from Ricci " << fmt(from_ricci);

  // Antisymmetrizing over four indices vanishes in three dimensions.
  double delta = 0;
  for (const auto& s : draw_jet_samples(9, 3, 3)) {
    auto fc = sample_curvature(s, 1);
    Eigen::Matrix3d S, G, D0, D2;
    double R = 0;
    for (int a = 0; a < 3; ++a) R += fc.eta[static_cast<std::size_t>(a)] * fc.nabla[0]({a, a});
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double ea = fc.eta[static_cast<std::size_t>(a)];
        S(a, b) = ea * (fc.nabla[0]({a, b}) - (a == b ? ea * R / 3 : 0.0));
        double dRa = 0, dRb = 0;
        for (int c = 0; c < 3; ++c) {
          dRa += fc.eta[static_cast<std::size_t>(c)] * fc.nabla[1]({c, c, a});
          dRb += fc.eta[static_cast<std::size_t>(c)] * fc.nabla[1]({c, c, b});
        }
        G(a, b) = ea * dRa * dRb;
        D0(a, b) = ea * fc.nabla[1]({a, b, 0});
        D2(a, b) = ea * fc.nabla[1]({a, b, 2});
      }
    double v = generalized_delta({S, S, G, D0}), w = generalized_delta({S, D2, D0, G});
    double scale = S.norm() * S.norm() * G.norm() * D0.norm() + S.norm() * D2.norm() * D0.norm() * G.norm();
    delta = std::max(delta, (std::abs(v) + std::abs(w)) / scale);
  }
  ok = ok && delta < 1e-12;
  out << ", 4-index antisymmetrization " << fmt(delta);
  return {ok, out.str()};
}

Outcome segre() {
  std::ostringstream out;
  bool ok = true;
  auto check = [&](const std::string& name, const SegreType& s, const std::string& tag, const std::string& type) {
    bool good = s.tag == tag && s.ricci_type == type;
    ok = ok && good;
    out << name << " " << s.tag << "/" << s.ricci_type << (good ? "" : " (want " + tag + "/" + type + ")") << "; ";
  };
  check("Minkowski", segre_type(MetricSpec::minkowski(), txy(0.3, -0.2, 0.1)), "{(1,11)}", "O");
  auto ds = segre_type(MetricSpec::de_sitter(Rational(1, 2)), txy(0.2, 0.1, -0.3));
  check("de Sitter", ds, "{(1,11)}", "D");
  // -dt^2 + e^{2t} dx^2 + e^{3t} dy^2: three distinct real eigenvalues.
  MetricSpec b({"t", "x", "y"}, std::vector<Expr>(9, Expr(0)));
  b.set(0, 0, Expr(-1));
  b.set(1, 1, expr::exp(Expr(2) * Expr::symbol("t")));
  b.set(2, 2, expr::exp(Expr(3) * Expr::symbol("t")));
  check("Bianchi I", segre_type(b, txy(0.1, 0, 0)), "{1,11}", "I");
  // -dudv-style wave: Ricci ~ l l with l null, lambda1 = 0.
  Expr xx = Expr::symbol("x");
  MetricSpec pp({"u", "v", "x"}, std::vector<Expr>(9, Expr(0)));
  pp.set(0, 0, xx * xx);
  pp.set(0, 1, Expr(-1));
  pp.set(1, 0, Expr(-1));
  pp.set(2, 2, Expr(1));
  Point q;
  q.set("u", 0.1);
  q.set("v", 0.2);
  q.set("x", 1.3);
  auto wave = segre_type(pp, q);
  check("plane wave", wave, "{(21)}", "N");
  ok = ok && wave.lambda1 && std::abs(*wave.lambda1) < 1e-12;
  return {ok, out.str()};
}

Outcome filter() {
  std::ostringstream out;
  bool ok = true;
  Expr r = Expr::symbol("r");
  std::vector<Point> radial;
  for (int i = 0; i < 40; ++i) {
    Point p;
    p.set("t", 0.0);
    p.set("r", 0.5 + 0.05 * i);
    p.set("phi", 0.0);
    radial.push_back(p);
  }
  std::vector<std::string> gnames(GodelData::names().begin(), GodelData::names().end());
  std::vector<std::pair<Expr, Expr>> pairs{{r * r, r},
                                           {expr::pow(expr::sinh(r), 2), expr::sinh(r) * expr::cosh(r)},
                                           {expr::exp(r) + r * r * r, Expr(1) + r * r}};
  out << "Godel |F_w|/rank/q:";
  for (const auto& [H, D] : pairs) {
    auto gd = godel_cartan_invariants(H, D);
    auto fam = expression_family(gnames, gd.list(), {"t", "r", "phi"});
    auto st = cartan_filter(fam, radial, polynomial_fit_oracle(fam, radial));
    bool good = st.terminated && st.q <= 5 && st.f_omega.size() <= 6 && !st.f_omega.empty() && st.functional_rank <= 1;
    ok = ok && good;
    out << " " << st.f_omega.size() << "/" << st.functional_rank << "/" << st.q;
  }
  std::vector<Point> cloud;
  for (int i = 0; i < 6; ++i) cloud.push_back(txy(0.02 * i - 0.05, 0.03 * ((i * 7) % 5) - 0.06, 0.025 * ((i * 3) % 4) - 0.04));
  auto oracle = jet_rank_oracle(cartan_function(), draw_jet_samples(11, 5, 3, true));
  out << "; P-type I |F_w|/rank/q:";
  for (const auto& [g, cf] : ptype1_metrics(3)) {
    auto st = cartan_filter(cartan_family(g), cloud, oracle);
    bool good = st.terminated && st.q <= 5 && st.functional_rank == 3 && st.f_omega.size() <= 18;
    ok = ok && good;
    out << " " << st.f_omega.size() << "/" << st.functional_rank << "/" << st.q;
  }
  auto ds = invariant_family(MetricSpec::de_sitter(Rational(1, 2)), builtin_basis(BuiltinBasis::zeroth));
  auto sd = cartan_filter(ds, cloud, polynomial_fit_oracle(ds, cloud));
  ok = ok && sd.terminated && sd.functional_rank == 0;
  out << "; de Sitter " << sd.f_omega.size() << "/" << sd.functional_rank << "/" << sd.q;
  return {ok, out.str()};
}

}  // namespace

int main() {
  report(1, "counting formula", counting);
  report(2, "Karlhede bound", karlhede);
  report(3, "new invariants per low-degree case, 5 seeds", per_case);
  report(4, "Godel-like identities, 3 pairs x 20 points", godel);
  report(5, "zeroth-order invariants in Psi scalars", sci0);
  report(6, "algebraic rank of the 18 first-order frame scalars", frame_rank);
  report(7, "first-order invariants R1..R4, frame vs tensor", first_order);
  report(8, "property suite", properties);
  report(9, "Segre classifier", segre);
  report(10, "Cartan filter termination and Godel structure", filter);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
