#include "curv3d/frames.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "curv3d/invariants.hpp"

namespace curv3d {

using expr::Expr;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

Tensor<double> covariant_tensor(int rank) {
  return Tensor<double>(3, std::vector<Variance>(static_cast<std::size_t>(rank), Variance::covariant), 0.0);
}

Tensor<double> as_tensor(const Mat3& Q) {
  Tensor<double> t(3, {Variance::covariant, Variance::contravariant}, 0.0);
  for (int A = 0; A < 3; ++A)
    for (int a = 0; a < 3; ++a) t({A, a}) = Q(A, a);
  return t;
}

// S_AB in an orthonormal frame.
Mat3 trace_free(const FramePoint& fp) {
  const auto& ric = fp.fc.nabla.at(0);
  Mat3 S;
  for (int A = 0; A < 3; ++A)
    for (int B = 0; B < 3; ++B) S(A, B) = ric({A, B}) - (A == B ? fp.frame.eta[static_cast<std::size_t>(A)] * fp.R / 3 : 0.0);
  return S;
}

// (nabla S)_ABC.
Tensor<double> nabla_trace_free(const FramePoint& fp) {
  Tensor<double> out = fp.fc.nabla.at(1);
  for (int A = 0; A < 3; ++A)
    for (int C = 0; C < 3; ++C) out({A, A, C}) -= fp.frame.eta[static_cast<std::size_t>(A)] * fp.dR[static_cast<std::size_t>(C)] / 3;
  return out;
}

std::array<double, 3> ricci_gradient(const FrameCurvature<double>& fc) {
  std::array<double, 3> d{};
  for (int C = 0; C < 3; ++C)
    for (int D = 0; D < 3; ++D) d[static_cast<std::size_t>(C)] += fc.eta[static_cast<std::size_t>(D)] * fc.nabla.at(1)({D, D, C});
  return d;
}

double bilinear(const Mat3& S, const Vec3& x, const Vec3& y) { return x.dot(S * y); }

// W(Z, Y, X) = g(Z, nabla_X Y) for constant-coefficient frame vectors.
double connection_form(const Tensor<double>& omega, const Vec3& Z, const Vec3& Y, const Vec3& X) {
  double acc = 0;
  for (int B = 0; B < 3; ++B)
    for (int A = 0; A < 3; ++A)
      for (int C = 0; C < 3; ++C) acc += Z(B) * Y(A) * X(C) * omega({B, A, C});
  return acc;
}

// Frame components of nabla_{e_C} X.
Vec3 covariant_along(const FramePoint& fp, const Vec3& X, int C) {
  Vec3 out = Vec3::Zero();
  for (int D = 0; D < 3; ++D)
    for (int A = 0; A < 3; ++A) out(D) += fp.frame.eta[static_cast<std::size_t>(D)] * fp.omega({D, A, C}) * X(A);
  return out;
}

Vec3 triad_row(int k) { return NullTriad::coefficients().row(k).transpose(); }

std::array<double, 3> triad_directional(const std::array<double, 3>& eC) {
  const Mat3& T = NullTriad::coefficients();
  Vec3 v(eC[0], eC[1], eC[2]);
  Vec3 out = T * v;
  return {out(0), out(1), out(2)};
}

}  // namespace

const Mat3& NullTriad::coefficients() {
  static const Mat3 T = [] {
    Mat3 t;
    t << kInvSqrt2, kInvSqrt2, 0, kInvSqrt2, -kInvSqrt2, 0, 0, 0, kInvSqrt2;
    return t;
  }();
  return T;
}

NullTriad null_triad(const OrthoFrame& f) {
  Mat3 chart = NullTriad::coefficients() * f.E;
  NullTriad t;
  t.l = chart.row(0).transpose();
  t.n = chart.row(1).transpose();
  t.m = chart.row(2).transpose();
  return t;
}

FramePoint frame_point(const JetCurvature& jc) {
  if (jc.nabla.size() < 2) throw std::invalid_argument("frame data needs nabla Ric");
  JetFrame jf = orthonormal_frame(jc.g);
  FramePoint fp;
  for (int A = 0; A < 3; ++A) {
    fp.frame.eta[static_cast<std::size_t>(A)] = jf.eta[static_cast<std::size_t>(A)];
    for (int a = 0; a < 3; ++a) fp.frame.E(A, a) = jf.E({A, a}).value();
  }
  Tensor<double> E = as_tensor(fp.frame.E);
  fp.fc.eta = jf.eta;
  for (const auto& t : jc.nabla) fp.fc.nabla.push_back(to_frame(values(t), E));
  fp.R = jc.scalar.value();
  for (int C = 0; C < 3; ++C) {
    double d = 0;
    for (int c = 0; c < 3; ++c) d += fp.frame.E(C, c) * jc.scalar.gradient(c);
    fp.dR[static_cast<std::size_t>(C)] = d;
  }
  // omega_BAC = g_ab e_B^a e_C^c (d_c e_A^b + Gamma^b_cd e_A^d)
  fp.omega = covariant_tensor(3);
  Tensor<double> g = values(jc.g), gam = values(jc.gamma);
  for (int A = 0; A < 3; ++A)
    for (int C = 0; C < 3; ++C) {
      Vec3 nab = Vec3::Zero();
      for (int b = 0; b < 3; ++b) {
        double v = 0;
        for (int c = 0; c < 3; ++c) {
          double dc = jf.E({A, b}).gradient(c);
          for (int d = 0; d < 3; ++d) dc += gam({b, c, d}) * fp.frame.E(A, d);
          v += fp.frame.E(C, c) * dc;
        }
        nab(b) = v;
      }
      for (int B = 0; B < 3; ++B) {
        double w = 0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) w += g({a, b}) * fp.frame.E(B, a) * nab(b);
        fp.omega({B, A, C}) = w;
      }
    }
  return fp;
}

FramePoint frame_point(const MetricSpec& g, const expr::Point& p, int max_d) {
  return frame_point(jet_curvature(g, p, std::max(1, max_d)));
}

// ---------------------------------------------------------------- scalars

nlohmann::json PsiScalars::to_json() const {
  return {{"R", R}, {"Psi0", psi0}, {"Psi1", psi1}, {"Psi2", psi2}, {"Psi3", psi3}, {"Psi4", psi4}};
}

Mat3 PsiScalars::trace_free_ricci() const {
  // Triad components, rows/cols l, n, m.
  Mat3 s;
  s << psi0, psi2, psi1, psi2, psi4, psi3, psi1, psi3, psi2;
  // e0 = (l + n)/sqrt2, e1 = (l - n)/sqrt2, e2 = sqrt2 m
  Mat3 c;
  c << kInvSqrt2, kInvSqrt2, 0, kInvSqrt2, -kInvSqrt2, 0, 0, 0, 2 * kInvSqrt2;
  return c * s * c.transpose();
}

const std::array<const char*, 9>& SpinCoefficients::names() {
  static const std::array<const char*, 9> n{"alpha", "epsilon", "lambda", "kappa", "pi", "gamma", "tau", "sigma", "nu"};
  return n;
}

nlohmann::json SpinCoefficients::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  auto v = values();
  for (std::size_t i = 0; i < v.size(); ++i) j[names()[i]] = v[i];
  return j;
}

PsiScalars psi_components(const FramePoint& fp) {
  Mat3 S = trace_free(fp);
  Vec3 l = triad_row(0), n = triad_row(1), m = triad_row(2);
  PsiScalars p;
  p.R = fp.R;
  p.psi0 = bilinear(S, l, l);
  p.psi1 = bilinear(S, l, m);
  p.psi2 = bilinear(S, l, n);
  p.psi3 = bilinear(S, n, m);
  p.psi4 = bilinear(S, n, n);
  return p;
}

SpinCoefficients spin_coefficients(const FramePoint& fp) {
  Vec3 l = triad_row(0), n = triad_row(1), m = triad_row(2);
  auto W = [&](const Vec3& z, const Vec3& y, const Vec3& x) { return connection_form(fp.omega, z, y, x); };
  SpinCoefficients s;
  s.kappa = -W(m, l, l);
  s.tau = -W(m, l, n);
  s.sigma = -W(m, l, m);
  s.pi = W(m, n, l);
  s.nu = W(m, n, n);
  s.lambda = W(m, n, m);
  s.epsilon = -0.5 * W(n, l, l);
  s.gamma = -0.5 * W(n, l, n);
  s.alpha = -0.5 * W(n, l, m);
  return s;
}

Tensor<double> omega_from_spin(const SpinCoefficients& s) {
  // Triad-indexed W(Z, Y, X), indices 0 = l, 1 = n, 2 = m.
  double w[3][3][3] = {};
  const double ml[3] = {-s.kappa, -s.tau, -s.sigma};
  const double mn[3] = {s.pi, s.nu, s.lambda};
  const double nl[3] = {-2 * s.epsilon, -2 * s.gamma, -2 * s.alpha};
  for (int X = 0; X < 3; ++X) {
    w[2][0][X] = ml[X];
    w[0][2][X] = -ml[X];
    w[2][1][X] = mn[X];
    w[1][2][X] = -mn[X];
    w[1][0][X] = nl[X];
    w[0][1][X] = -nl[X];
  }
  // Orthonormal vectors in the triad basis.
  Mat3 c;
  c << kInvSqrt2, kInvSqrt2, 0, kInvSqrt2, -kInvSqrt2, 0, 0, 0, 2 * kInvSqrt2;
  Tensor<double> omega = covariant_tensor(3);
  for (int B = 0; B < 3; ++B)
    for (int A = 0; A < 3; ++A)
      for (int C = 0; C < 3; ++C) {
        double acc = 0;
        for (int z = 0; z < 3; ++z)
          for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 3; ++x) acc += c(B, z) * c(A, y) * c(C, x) * w[z][y][x];
        omega({B, A, C}) = acc;
      }
  return omega;
}

double frame_derivative(FrameOp op, const Jet& f, const FramePoint& fp) {
  std::array<double, 3> eC{};
  for (int C = 0; C < 3; ++C)
    for (int c = 0; c < 3; ++c) eC[static_cast<std::size_t>(C)] += fp.frame.E(C, c) * f.gradient(c);
  return triad_directional(eC)[static_cast<std::size_t>(op)];
}

double frame_derivative(FrameOp op, const Expr& f, const MetricSpec& g, const expr::Point& p, const FramePoint& fp) {
  return frame_derivative(op, taylor(f, g.coords, p, 1, &g.functions), fp);
}

nlohmann::json FrameDerivatives::to_json() const {
  auto one = [](const std::array<double, 3>& v) { return nlohmann::json{{"D", v[0]}, {"Delta", v[1]}, {"delta", v[2]}}; };
  return {{"R", one(R)}, {"Psi0", one(psi0)}, {"Psi2", one(psi2)}};
}

FrameDerivatives frame_derivatives(const FramePoint& fp) {
  Mat3 S = trace_free(fp);
  Tensor<double> dS = nabla_trace_free(fp);
  // e_C(S(X, Y)) = (nabla_C S)(X, Y) + S(nabla_C X, Y) + S(X, nabla_C Y)
  auto along = [&](const Vec3& X, const Vec3& Y) {
    std::array<double, 3> eC{};
    for (int C = 0; C < 3; ++C) {
      double acc = 0;
      for (int A = 0; A < 3; ++A)
        for (int B = 0; B < 3; ++B) acc += X(A) * Y(B) * dS({A, B, C});
      acc += bilinear(S, covariant_along(fp, X, C), Y) + bilinear(S, X, covariant_along(fp, Y, C));
      eC[static_cast<std::size_t>(C)] = acc;
    }
    return triad_directional(eC);
  };
  Vec3 l = triad_row(0), n = triad_row(1);
  FrameDerivatives d;
  d.R = triad_directional(fp.dR);
  d.psi0 = along(l, l);
  d.psi2 = along(l, n);
  return d;
}

// --------------------------------------------------------- canonical frame

nlohmann::json CanonicalFrame::to_json() const {
  nlohmann::json q = nlohmann::json::array();
  for (int A = 0; A < 3; ++A) q.push_back({Q(A, 0), Q(A, 1), Q(A, 2)});
  nlohmann::json e = nlohmann::json::array();
  for (int A = 0; A < 3; ++A) e.push_back({fp.frame.E(A, 0), fp.frame.E(A, 1), fp.frame.E(A, 2)});
  return {{"psi", psi.to_json()},
          {"spin_coefficients", spin.to_json()},
          {"frame_derivatives", derivs.to_json()},
          {"eigenvalues", mu},
          {"min_gap", min_gap},
          {"frame", e}};
}

CanonicalFrame canonicalize_ptype1(const FramePoint& fp, double tol) {
  Mat3 S = trace_free(fp);
  const auto& eta = fp.frame.eta;
  Mat3 mixed;
  for (int A = 0; A < 3; ++A)
    for (int B = 0; B < 3; ++B) mixed(A, B) = eta[static_cast<std::size_t>(A)] * S(A, B);
  Eigen::EigenSolver<Mat3> es(mixed);
  double scale = std::max(mixed.cwiseAbs().maxCoeff(), 1e-300);
  for (int k = 0; k < 3; ++k)
    if (std::abs(es.eigenvalues()(k).imag()) > tol * scale)
      throw FrameError("trace-free Ricci has complex eigenvalues (Segre {1zz})");
  std::array<double, 3> lam{};
  std::array<Vec3, 3> vec;
  int timelike = -1;
  for (int k = 0; k < 3; ++k) {
    lam[static_cast<std::size_t>(k)] = es.eigenvalues()(k).real();
    Vec3 v = es.eigenvectors().col(k).real();
    v.normalize();
    double n2 = 0;
    for (int A = 0; A < 3; ++A) n2 += eta[static_cast<std::size_t>(A)] * v(A) * v(A);
    if (std::abs(n2) < std::sqrt(tol)) throw FrameError("trace-free Ricci has a null eigenvector");
    if (n2 < 0) {
      if (timelike >= 0) throw FrameError("more than one timelike eigenvector");
      timelike = k;
    }
    vec[static_cast<std::size_t>(k)] = v / std::sqrt(std::abs(n2));
  }
  if (timelike < 0) throw FrameError("no timelike eigenvector");
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) gap = std::min(gap, std::abs(lam[static_cast<std::size_t>(i)] - lam[static_cast<std::size_t>(j)]));
  if (gap <= tol * scale || scale < 1e-300) throw FrameError("repeated eigenvalues: the frame has continuous isotropy");

  std::array<int, 3> order{timelike, 0, 0};
  {
    int k = 1;
    for (int i = 0; i < 3; ++i)
      if (i != timelike) order[static_cast<std::size_t>(k++)] = i;
  }
  // Spacelike order: prefer Psi0 >= 0, then Psi2 >= 0, then the larger Psi0.
  auto score = [&](int a, int b) {
    double mu0 = lam[static_cast<std::size_t>(timelike)];
    double p0 = 0.5 * (lam[static_cast<std::size_t>(a)] - mu0);
    double p2 = 0.5 * lam[static_cast<std::size_t>(b)];
    return std::make_tuple(p0 >= 0, p2 >= 0, p0);
  };
  if (score(order[2], order[1]) > score(order[1], order[2])) std::swap(order[1], order[2]);

  Mat3 Q;
  for (int K = 0; K < 3; ++K) Q.row(K) = vec[static_cast<std::size_t>(order[static_cast<std::size_t>(K)])].transpose();
  // Orientation of each axis: e_A(R) > 0, else the largest chart component positive.
  double grad = std::sqrt(fp.dR[0] * fp.dR[0] + fp.dR[1] * fp.dR[1] + fp.dR[2] * fp.dR[2]);
  for (int K = 0; K < 3; ++K) {
    double eR = 0;
    for (int A = 0; A < 3; ++A) eR += Q(K, A) * fp.dR[static_cast<std::size_t>(A)];
    double sign;
    if (grad > 0 && std::abs(eR) > 1e-8 * grad) {
      sign = eR > 0 ? 1.0 : -1.0;
    } else {
      Vec3 chart = (Q.row(K) * fp.frame.E).transpose();
      Eigen::Index imax;
      chart.cwiseAbs().maxCoeff(&imax);
      sign = chart(imax) > 0 ? 1.0 : -1.0;
    }
    Q.row(K) *= sign;
  }

  CanonicalFrame cf;
  cf.Q = Q;
  cf.min_gap = gap;
  for (int K = 0; K < 3; ++K) cf.mu[static_cast<std::size_t>(K)] = lam[static_cast<std::size_t>(order[static_cast<std::size_t>(K)])];
  FramePoint& out = cf.fp;
  out.frame.eta = {-1.0, 1.0, 1.0};
  out.frame.E = Q * fp.frame.E;
  Tensor<double> Qt = as_tensor(Q);
  out.fc.eta = {-1.0, 1.0, 1.0};
  for (const auto& t : fp.fc.nabla) out.fc.nabla.push_back(to_frame(t, Qt));
  out.R = fp.R;
  out.dR = ricci_gradient(out.fc);
  Tensor<double> dS = nabla_trace_free(out);
  out.omega = covariant_tensor(3);
  for (int B = 0; B < 3; ++B)
    for (int A = 0; A < 3; ++A) {
      if (A == B) continue;
      double denom = cf.mu[static_cast<std::size_t>(B)] - cf.mu[static_cast<std::size_t>(A)];
      for (int C = 0; C < 3; ++C) out.omega({B, A, C}) = -dS({A, B, C}) / denom;
    }
  cf.psi = psi_components(out);
  cf.spin = spin_coefficients(out);
  cf.derivs = frame_derivatives(out);
  return cf;
}

std::vector<double> cartan_scalars(const CanonicalFrame& cf) {
  std::vector<double> v{cf.psi.R, cf.psi.psi0, cf.psi.psi2};
  for (const auto* a : {&cf.derivs.R, &cf.derivs.psi0, &cf.derivs.psi2}) v.insert(v.end(), a->begin(), a->end());
  auto s = cf.spin.values();
  v.insert(v.end(), s.begin(), s.end());
  return v;
}

const std::vector<std::string>& cartan_scalar_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"R", "Psi0", "Psi2"};
    for (const char* f : {"R", "Psi0", "Psi2"})
      for (const char* op : {"D", "Delta", "delta"}) n.push_back(std::string(op) + "(" + f + ")");
    for (const char* s : SpinCoefficients::names()) n.emplace_back(s);
    return n;
  }();
  return names;
}

// -------------------------------------------------------------- Godel-like

const std::array<const char*, 6>& GodelData::names() {
  static const std::array<const char*, 6> n{"I0", "I1", "I2", "I0'", "I1'", "I2'"};
  return n;
}

GodelData godel_cartan_invariants(const Expr& H, const Expr& D, const std::string& coord) {
  GodelData g;
  g.H = H;
  g.D = D;
  auto d = [&](const Expr& e) { return expr::differentiate(e, coord); };
  g.I0 = d(H) / D;
  g.I1 = d(d(D)) / D;
  g.I2 = d(D) / D;
  g.I0p = d(g.I0);
  g.I1p = d(g.I1);
  g.I2p = d(g.I2);
  return g;
}

std::array<double, 4> godel_polynomials(double I0, double I1, double I0p, double I1p) {
  double I0_2 = I0 * I0, I0_4 = I0_2 * I0_2;
  return {-2 * I1 + 0.5 * I0_2,
          2 * I1 * I1 - 2 * I1 * I0_2 - 0.5 * I0p * I0p + 0.75 * I0_4,
          -2 * I1 * I1 * I1 + 0.75 * I1 * I0p * I0p + 3 * I1 * I1 * I0_2 - 1.5 * I1 * I0_4 + 0.125 * I0_4 * I0_2,
          (-I0 * I0p + 2 * I1p) * (-I0 * I0p + 2 * I1p)};
}

nlohmann::json GodelReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : samples) rows.push_back({{"r", s.r}, {"tensor", s.tensor}, {"polynomial", s.poly}, {"residual", s.residual}});
  return {{"invariants", {"R", "R_{ab}R^{ab}", "R^{ab}R_a^{~c}R_{bc}", "R_{;a}R^{;a}"}},
          {"samples", rows},
          {"max_residual", max_residual}};
}

GodelReport verify_godel_relations(const Expr& H, const Expr& D, const std::vector<double>& r_samples,
                                   const expr::FunctionTable* functions) {
  MetricSpec g = MetricSpec::godel_like(H, D);
  if (functions) g.functions = *functions;
  GodelData gd = godel_cartan_invariants(H, D, "r");
  static const std::array<Invariant, 4> invs = {parse_invariant("R"), parse_invariant("R_{ab}R^{ab}"),
                                                parse_invariant("R^{ab}R_a^{~c}R_{bc}"), parse_invariant("R_{;a}R^{;a}")};
  GodelReport rep;
  for (double r : r_samples) {
    expr::Point p;
    p.set("t", 0.0);
    p.set("r", r);
    p.set("phi", 0.0);
    double Dv = expr::evaluate_float(D, p, functions);
    if (std::abs(Dv) < 1e-12) throw DomainError("D vanishes at r = " + std::to_string(r));
    GodelSample s;
    s.r = r;
    FrameCurvature<double> fc = frame_values(g, p, 1);
    for (std::size_t k = 0; k < 4; ++k) s.tensor[k] = evaluate(invs[k], fc);
    auto I = expr::evaluate_many({gd.I0, gd.I1, gd.I0p, gd.I1p}, p, functions);
    s.poly = godel_polynomials(I[0], I[1], I[2], I[3]);
    for (std::size_t k = 0; k < 4; ++k) {
      double scale = std::max({std::abs(s.tensor[k]), std::abs(s.poly[k]), 1.0});
      s.residual[k] = std::abs(s.tensor[k] - s.poly[k]) / scale;
      rep.max_residual = std::max(rep.max_residual, s.residual[k]);
    }
    rep.samples.push_back(s);
  }
  return rep;
}

// ------------------------------------------------------ first-order invariants

std::array<double, 4> np_first_order_invariants(const PsiScalars& psi, const SpinCoefficients& sc, const FrameDerivatives& d) {
  const double Psi0 = psi.psi0, Psi2 = psi.psi2;
  const double alpha = sc.alpha, epsilon = sc.epsilon, lambda = sc.lambda, kappa = sc.kappa, pi = sc.pi,
               gamma = sc.gamma, tau = sc.tau, sigma = sc.sigma, nu = sc.nu;
  const double DR = d.R[0], DeltaR = d.R[1], deltaR = d.R[2];
  const double DPsi0 = d.psi0[0], DeltaPsi0 = d.psi0[1], deltaPsi0 = d.psi0[2];
  const double DPsi2 = d.psi2[0], DeltaPsi2 = d.psi2[1], deltaPsi2 = d.psi2[2];
  auto sq = [](double x) { return x * x; };

  double R1 = -2 * DR * DeltaR + 2 * sq(deltaR);

  double R2 = 12 * tau * Psi0 * kappa * Psi2 + 12 * nu * Psi2 * pi * Psi0 + 16 * gamma * sq(Psi0) * epsilon -
              2 * tau * sq(Psi0) * pi - 18 * nu * sq(Psi2) * kappa - 12 * sq(sigma) * Psi0 * Psi2 +
              4 * sigma * sq(Psi0) * lambda + 36 * lambda * sq(Psi2) * sigma - 12 * sq(lambda) * Psi2 * Psi0 -
              2 * kappa * sq(Psi0) * nu - 18 * pi * sq(Psi2) * tau - 3 * DPsi2 * DeltaPsi2 - DeltaPsi0 * DPsi0 -
              16 * sq(alpha) * sq(Psi0) + sq(deltaPsi0) + 3 * sq(deltaPsi2);

  double R3 = -2 * pi * Psi0 * deltaPsi0 - 8 * pi * sq(Psi0) * alpha - 6 * deltaPsi2 * pi * Psi2 - DPsi2 * DeltaPsi2 -
              DeltaPsi0 * DPsi0 - DPsi2 * DPsi0 + 9 * sq(tau) * sq(Psi2) + sq(nu) * sq(Psi0) + sq(kappa) * sq(Psi0) -
              DeltaPsi2 * DeltaPsi0 + 4 * sq(deltaPsi2) - 18 * nu * sq(Psi2) * kappa - 12 * sq(sigma) * Psi0 * Psi2 +
              4 * sigma * sq(Psi0) * lambda + 36 * lambda * sq(Psi2) * sigma - 12 * sq(lambda) * Psi2 * Psi0 +
              4 * DeltaPsi2 * lambda * Psi0 + 6 * deltaPsi2 * tau * Psi2 - 2 * deltaPsi2 * nu * Psi0 +
              4 * DeltaPsi2 * gamma * Psi0 - 12 * DeltaPsi2 * sigma * Psi2 - 4 * gamma * Psi0 * DPsi0 +
              4 * DeltaPsi0 * epsilon * Psi0 - 8 * alpha * sq(Psi0) * tau + 2 * deltaPsi0 * tau * Psi0 -
              6 * deltaPsi0 * nu * Psi2 + 6 * kappa * Psi2 * deltaPsi0 - 4 * DPsi2 * epsilon * Psi0 +
              2 * deltaPsi2 * kappa * Psi0 - 4 * DPsi2 * sigma * Psi0 + 12 * DPsi2 * lambda * Psi2 +
              6 * tau * Psi0 * kappa * Psi2 - 2 * tau * sq(Psi0) * pi + 16 * gamma * sq(Psi0) * epsilon +
              24 * alpha * Psi0 * nu * Psi2 + 24 * kappa * Psi2 * alpha * Psi0 - 6 * tau * Psi2 * nu * Psi0 +
              9 * sq(pi) * sq(Psi2) - 6 * kappa * Psi0 * pi * Psi2 + 6 * nu * Psi2 * pi * Psi0;

  double R4 = 4 * DR * epsilon * Psi0 + DR * DPsi0 - 2 * deltaR * kappa * Psi0 + 6 * deltaR * pi * Psi2 + DPsi2 * DeltaR -
              2 * DR * sigma * Psi0 + 6 * DR * lambda * Psi2 + 4 * deltaPsi2 * deltaR - 6 * DeltaR * sigma * Psi2 +
              2 * DeltaR * lambda * Psi0 + DeltaPsi2 * DR - 6 * deltaR * tau * Psi2 + 2 * deltaR * nu * Psi0 -
              4 * DeltaR * gamma * Psi0 + DeltaR * DeltaPsi0;

  return {R1, R2, R3, R4};
}

std::array<double, 4> np_first_order_invariants(const CanonicalFrame& cf) {
  return np_first_order_invariants(cf.psi, cf.spin, cf.derivs);
}

std::array<double, 4> tensor_first_order_invariants(const FrameCurvature<double>& fc) {
  static const std::array<Invariant, 4> invs = {parse_invariant("R_{;a}R^{;a}"), parse_invariant("S_{ab;c}S^{ab;c}"),
                                                parse_invariant("S_{ab;c}S^{ac;b}"), parse_invariant("S^a_{b;a}R^{;b}")};
  return {evaluate(invs[0], fc), 0.25 * evaluate(invs[1], fc), 0.5 * evaluate(invs[2], fc), evaluate(invs[3], fc)};
}

}  // namespace curv3d
