#include "curv3d/curvature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace curv3d {

JetCurvature jet_curvature(const Tensor<Jet>& g, int max_d) {
  auto deriv = [](const Jet& j, int c) { return j.derivative(c); };
  JetCurvature out;
  out.g = g;
  out.ginv = talg::inverse(g);
  out.gamma = talg::christoffel(g, out.ginv, deriv);
  out.riemann_up = talg::riemann(out.gamma, deriv);
  out.ricci = talg::ricci(out.riemann_up);
  out.scalar = talg::trace2(out.ricci, out.ginv);
  out.nabla.push_back(out.ricci);
  for (int d = 1; d <= max_d; ++d) out.nabla.push_back(talg::covariant_derivative(out.nabla.back(), out.gamma, deriv));
  return out;
}

JetCurvature jet_curvature(const MetricSpec& g, const expr::Point& p, int max_d, int extra) {
  int order = 2 + max_d + extra;
  auto comps = taylor_many(g.g, g.coords, p, order, &g.functions);
  Tensor<Jet> gt(g.dim, {Variance::covariant, Variance::covariant}, comps[0]);
  gt.data() = std::move(comps);
  return jet_curvature(gt, max_d);
}

JetFrame orthonormal_frame(const Tensor<Jet>& g) {
  int n = g.dim();
  Eigen::MatrixXd g0(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) g0(a, b) = g({a, b}).value();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g0);
  // Eigenvalues ascend, so timelike directions come first.
  auto space = g[0].space_ptr();
  JetFrame f;
  f.E = Tensor<Jet>(n, {Variance::covariant, Variance::contravariant}, Jet(space, 0.0));
  auto inner = [&](const std::vector<Jet>& u, const std::vector<Jet>& v) {
    Jet acc(space, 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) acc += g({a, b}) * u[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(b)];
    return acc;
  };
  std::vector<std::vector<Jet>> basis;
  for (int A = 0; A < n; ++A) {
    std::vector<Jet> v;
    Eigen::VectorXd seed = es.eigenvectors().col(A);
    // Fix the seed sign so the largest component is positive.
    Eigen::Index imax;
    seed.cwiseAbs().maxCoeff(&imax);
    if (seed(imax) < 0) seed = -seed;
    for (int a = 0; a < n; ++a) v.emplace_back(space, seed(a));
    for (int B = 0; B < A; ++B) {
      Jet proj = inner(v, basis[static_cast<std::size_t>(B)]) * f.eta[static_cast<std::size_t>(B)];
      for (int a = 0; a < n; ++a) v[static_cast<std::size_t>(a)] -= proj * basis[static_cast<std::size_t>(B)][static_cast<std::size_t>(a)];
    }
    Jet norm2 = inner(v, v);
    double sign = norm2.value() < 0 ? -1.0 : 1.0;
    Jet inv = pow(norm2 * sign, -0.5);
    for (auto& x : v) x = x * inv;
    f.eta.push_back(sign);
    basis.push_back(v);
    for (int a = 0; a < n; ++a) f.E({A, a}) = v[static_cast<std::size_t>(a)];
  }
  return f;
}

Tensor<double> values(const Tensor<Jet>& T) {
  Tensor<double> out(T.dim(), T.slots(), 0.0);
  for (std::size_t i = 0; i < T.size(); ++i) out[i] = T[i].value();
  return out;
}

FrameCurvature<Jet> frame_jets(const JetCurvature& c) {
  JetFrame f = orthonormal_frame(c.g);
  FrameCurvature<Jet> out;
  out.eta = f.eta;
  for (const auto& t : c.nabla) out.nabla.push_back(to_frame(t, f.E));
  return out;
}

FrameCurvature<double> frame_values(const JetCurvature& c) {
  int n = c.g.dim();
  Eigen::MatrixXd g0(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) g0(a, b) = c.g({a, b}).value();
  // Constant frame at the base point only.
  Tensor<Jet> gconst(n, {Variance::covariant, Variance::covariant}, Jet(JetSpace::get(n, 0), 0.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) gconst({a, b}) = Jet(JetSpace::get(n, 0), g0(a, b));
  JetFrame f = orthonormal_frame(gconst);
  FrameCurvature<double> out;
  out.eta = f.eta;
  Tensor<double> E = values(f.E);
  for (const auto& t : c.nabla) out.nabla.push_back(to_frame(values(t), E));
  return out;
}

FrameCurvature<double> frame_values(const MetricSpec& g, const expr::Point& p, int max_d) {
  return frame_values(jet_curvature(g, p, max_d));
}

// ----------------------------------------------------------- jet samples

std::size_t JetSample::num_coeffs(int order) { return 6 * (JetSpace::get(3, order)->size() - 1); }

Tensor<Jet> JetSample::metric(int jet_order) const {
  int jo = jet_order < 0 ? order : jet_order;
  auto space = JetSpace::get(3, jo);
  auto src = JetSpace::get(3, order);
  Tensor<Jet> g(3, {Variance::covariant, Variance::covariant}, Jet(space, 0.0));
  std::size_t per = src->size() - 1;
  std::size_t pair = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b, ++pair) {
      Jet j(space, a == b ? (a == 0 ? -1.0 : 1.0) : 0.0);
      for (std::size_t m = 1; m < src->size(); ++m) {
        if (src->degree(m) > jo) break;
        long idx = space->index(src->exponents(m));
        j.coeff(static_cast<std::size_t>(idx)) = coeffs[pair * per + (m - 1)];
      }
      g({a, b}) = j;
      g({b, a}) = j;
    }
  return g;
}

JetSampler::JetSampler(std::uint64_t seed, int order, double amplitude)
    : seed_(seed), order_(order), amplitude_(amplitude), rng_(seed) {}

JetSample JetSampler::next() {
  JetSample s;
  s.order = order_;
  s.seed = seed_ * 0x9e3779b97f4a7c15ULL + (++counter_);
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> u(-amplitude_, amplitude_);
  s.coeffs.resize(JetSample::num_coeffs(order_));
  for (auto& c : s.coeffs) c = u(rng);
  return s;
}

FrameCurvature<double> sample_curvature(const JetSample& s, int max_d) {
  JetCurvature c = jet_curvature(s.metric(std::max(s.order, 2 + max_d)), max_d);
  FrameCurvature<double> out;
  out.eta = {-1.0, 1.0, 1.0};
  for (const auto& t : c.nabla) out.nabla.push_back(values(t));
  return out;
}

}  // namespace curv3d
