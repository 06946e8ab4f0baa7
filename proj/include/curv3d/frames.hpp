#pragma once

// Null triads, Psi scalars, spin coefficients and frame derivatives at a
// point; canonical frames for P-type I; the Godel-like example and the
// first-order invariants written in frame scalars.

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "curv3d/curvature.hpp"
#include "curv3d/expr.hpp"
#include "curv3d/tensor.hpp"
#include "json.hpp"

namespace curv3d {

class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Orthonormal frame at a point: row A of E holds the chart components e_A^a.
struct OrthoFrame {
  Eigen::Matrix3d E = Eigen::Matrix3d::Identity();
  std::array<double, 3> eta{-1.0, 1.0, 1.0};
};

/// l = (e0 + e1)/sqrt2, n = (e0 - e1)/sqrt2, m = e2/sqrt2, so l.n = -1 and m.m = 1/2.
struct NullTriad {
  Eigen::Vector3d l, n, m;  // chart components
  static const Eigen::Matrix3d& coefficients();  // rows l, n, m in the orthonormal basis
};
NullTriad null_triad(const OrthoFrame& f);

enum class FrameOp { D, Delta, delta };

/// Curvature data in an orthonormal frame at one point.
struct FramePoint {
  OrthoFrame frame;
  FrameCurvature<double> fc;      // frame components of nabla^d Ric
  Tensor<double> omega;           // omega(B, A, C) = g(e_B, nabla_{e_C} e_A)
  std::array<double, 3> dR{};     // e_A(R)
  double R = 0;
};

/// General frame from Gram-Schmidt on the metric jets (eigenvectors of g seed it).
FramePoint frame_point(const JetCurvature& jc);
FramePoint frame_point(const MetricSpec& g, const expr::Point& p, int max_d = 1);

struct PsiScalars {
  double psi0 = 0, psi1 = 0, psi2 = 0, psi3 = 0, psi4 = 0, R = 0;
  nlohmann::json to_json() const;
  /// S_ab in the orthonormal frame rebuilt from the five scalars.
  Eigen::Matrix3d trace_free_ricci() const;
};

struct SpinCoefficients {
  double alpha = 0, epsilon = 0, lambda = 0, kappa = 0, pi = 0, gamma = 0, tau = 0, sigma = 0, nu = 0;
  nlohmann::json to_json() const;
  std::array<double, 9> values() const { return {alpha, epsilon, lambda, kappa, pi, gamma, tau, sigma, nu}; }
  static const std::array<const char*, 9>& names();
};

PsiScalars psi_components(const FramePoint& fp);
SpinCoefficients spin_coefficients(const FramePoint& fp);
/// Connection coefficients omega(B, A, C) rebuilt from the nine spin coefficients.
Tensor<double> omega_from_spin(const SpinCoefficients& s);

/// Triad derivative of a scalar given as a jet at the frame's base point.
double frame_derivative(FrameOp op, const Jet& f, const FramePoint& fp);
/// Same for an expression, expanded on g's chart at p.
double frame_derivative(FrameOp op, const expr::Expr& f, const MetricSpec& g, const expr::Point& p,
                        const FramePoint& fp);

/// D, Delta, delta of R, Psi0 and Psi2 (from nabla Ric and the connection).
struct FrameDerivatives {
  std::array<double, 3> R{}, psi0{}, psi2{};
  nlohmann::json to_json() const;
};
FrameDerivatives frame_derivatives(const FramePoint& fp);

/// P-type I canonical frame: eigenframe of S^a_b, with Psi1 = Psi3 = 0 and Psi0 = Psi4.
struct CanonicalFrame {
  FramePoint fp;
  PsiScalars psi;
  SpinCoefficients spin;
  FrameDerivatives derivs;
  std::array<double, 3> mu{};   // eigenvalues of S^a_b, timelike direction first
  double min_gap = 0;           // smallest eigenvalue separation
  Eigen::Matrix3d Q;            // new frame rows in the old frame basis
  nlohmann::json to_json() const;
};

/// Throws FrameError for complex, repeated or null eigen-structure.
CanonicalFrame canonicalize_ptype1(const FramePoint& fp, double tol = 1e-9);

/// The 21 Cartan invariants R, Psi0, Psi2, the nine frame derivatives and the nine spin coefficients.
std::vector<double> cartan_scalars(const CanonicalFrame& cf);
const std::vector<std::string>& cartan_scalar_names();

// ------------------------------------------------------------ Godel-like

struct GodelData {
  expr::Expr H, D;
  expr::Expr I0, I1, I2, I0p, I1p, I2p;
  std::vector<expr::Expr> list() const { return {I0, I1, I2, I0p, I1p, I2p}; }
  static const std::array<const char*, 6>& names();
};

/// I0 = H'/D, I1 = D''/D, I2 = D'/D and their r-derivatives.
GodelData godel_cartan_invariants(const expr::Expr& H, const expr::Expr& D, const std::string& coord = "r");

struct GodelSample {
  double r = 0;
  std::array<double, 4> tensor{}, poly{}, residual{};
};

struct GodelReport {
  std::vector<GodelSample> samples;
  double max_residual = 0;
  nlohmann::json to_json() const;
};

/// R, R_ab R^ab, R^ab R_a^c R_bc and R_;a R^;a from the tensor pipeline against
/// their polynomials in the I's; residuals are relative above 1 and absolute below.
/// Throws DomainError where D vanishes.
GodelReport verify_godel_relations(const expr::Expr& H, const expr::Expr& D, const std::vector<double>& r_samples,
                                   const expr::FunctionTable* functions = nullptr);

/// Polynomials of R, R_ab R^ab, R^ab R_a^c R_bc, R_;a R^;a in (I0, I1, I0', I1').
std::array<double, 4> godel_polynomials(double I0, double I1, double I0p, double I1p);

// ------------------------------------------------------ first-order invariants

/// R_,a R^,a and the three long first-order expressions in a canonical frame.
std::array<double, 4> np_first_order_invariants(const PsiScalars& psi, const SpinCoefficients& spin,
                                                const FrameDerivatives& d);
std::array<double, 4> np_first_order_invariants(const CanonicalFrame& cf);

/// Tensor-side counterparts: R_;a R^;a, S_ab;c S^ab;c / 4, S_ab;c S^ac;b / 2, S^a_b;a R^;b.
std::array<double, 4> tensor_first_order_invariants(const FrameCurvature<double>& fc);

}  // namespace curv3d
