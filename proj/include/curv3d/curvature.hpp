#pragma once

// Numeric curvature from metric Taylor jets: Christoffel symbols, Riemann,
// Ricci and iterated covariant derivatives of Ricci, all as jets around a
// base point, plus orthonormal frames and random jet samples.

#include <cstdint>
#include <random>
#include <vector>

#include "curv3d/jet.hpp"
#include "curv3d/tensor.hpp"
#include "curv3d/tensor_algebra.hpp"

namespace curv3d {

struct JetCurvature {
  Tensor<Jet> g, ginv, gamma, riemann_up, ricci;
  Jet scalar;
  std::vector<Tensor<Jet>> nabla;  // nabla[d]: nabla^d Ric, all slots covariant
};

/// Requires jets valid to order >= 2 + max_d; outputs are valid to order - 2 - d.
JetCurvature jet_curvature(const Tensor<Jet>& g, int max_d);

/// Taylor-expands the metric at p to order 2 + max_d + extra and runs the pipeline.
JetCurvature jet_curvature(const MetricSpec& g, const expr::Point& p, int max_d, int extra = 0);

/// Orthonormal frame E(A, a) with g(E_A, E_B) = eta_AB, from Gram-Schmidt on
/// constant seeds (eigenvectors of g at the base point, timelike first).
struct JetFrame {
  Tensor<Jet> E;
  std::vector<double> eta;
};
JetFrame orthonormal_frame(const Tensor<Jet>& g);

/// Frame components of an all-covariant tensor.
template <class S>
Tensor<S> to_frame(Tensor<S> T, const Tensor<S>& E) {
  for (int s = 0; s < T.rank(); ++s) T = talg::transform_slot(T, E, s, Variance::covariant);
  return T;
}

Tensor<double> values(const Tensor<Jet>& T);

/// Curvature data ready for contraction: nabla^d Ric in an orthonormal frame.
template <class S>
struct FrameCurvature {
  std::vector<Tensor<S>> nabla;
  std::vector<double> eta;
};

FrameCurvature<double> frame_values(const JetCurvature& c);
/// Jet-valued frame components (exact gradients along coordinates).
FrameCurvature<Jet> frame_jets(const JetCurvature& c);
FrameCurvature<double> frame_values(const MetricSpec& g, const expr::Point& p, int max_d);

/// Numeric snapshot of a random metric jet: g_ab = eta_ab + sum c x^alpha, 1 <= |alpha| <= order.
struct JetSample {
  int order = 0;
  std::uint64_t seed = 0;
  std::vector<double> coeffs;  // per (a<=b) pair, monomials of degree 1..order in JetSpace order

  static std::size_t num_coeffs(int order);
  Tensor<Jet> metric(int jet_order = -1) const;
};

class JetSampler {
 public:
  JetSampler(std::uint64_t seed, int order, double amplitude = 0.25);
  JetSample next();
  int order() const { return order_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  int order_;
  double amplitude_;
  std::mt19937_64 rng_;
  std::uint64_t counter_ = 0;
};

/// Curvature of a jet sample at the origin (where the frame is the identity).
FrameCurvature<double> sample_curvature(const JetSample& s, int max_d);

}  // namespace curv3d
