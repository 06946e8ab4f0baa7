#pragma once

// Metrics on a coordinate chart and symbolic curvature tensors.

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "curv3d/expr.hpp"
#include "curv3d/tensor_algebra.hpp"
#include "json.hpp"

namespace curv3d {

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MetricSpec {
  int dim = 3;
  std::vector<std::string> coords;
  std::vector<expr::Expr> g;  // dim*dim, row-major, symmetric
  std::string signature = "-++";
  expr::FunctionTable functions;  // bodies for user functions appearing in g

  MetricSpec() = default;
  MetricSpec(std::vector<std::string> coordinates, std::vector<expr::Expr> components);

  const expr::Expr& operator()(int a, int b) const { return g[static_cast<std::size_t>(a * dim + b)]; }
  void set(int a, int b, const expr::Expr& e);
  Tensor<expr::Expr> tensor() const;

  /// Checks symmetry, nondegeneracy and signature at p; throws DomainError.
  void check_at(const expr::Point& p) const;

  static MetricSpec from_json(const nlohmann::json& j);
  static MetricSpec load(const std::string& path);
  nlohmann::json to_json() const;

  static MetricSpec minkowski();
  /// ds^2 = -(dt + H(r) dphi)^2 + D(r)^2 dphi^2 + dr^2 on (t, r, phi).
  static MetricSpec godel_like(const expr::Expr& H, const expr::Expr& D);
  /// -dt^2 + e^{2ht}(dx^2 + dy^2): constant curvature, R_ab = 2h^2 g_ab.
  static MetricSpec de_sitter(const Rational& h);
  /// eta + sum c x^alpha over monomials of degree 1..degree in (t, x, y), c = k/64 with |c| <= amplitude.
  static MetricSpec random_polynomial(std::uint64_t seed, int degree = 3, const Rational& amplitude = Rational(1, 4));
};

/// Pullback under x^a = phi^a(X), where phi is given in terms of the same coordinate names.
MetricSpec pullback(const MetricSpec& g, const std::vector<expr::Expr>& phi);

struct TensorField {
  Tensor<expr::Expr> t;
  int deriv_order = 0;
  std::vector<std::pair<int, int>> symmetric;
  std::vector<std::pair<int, int>> antisymmetric;

  int rank() const { return t.rank(); }
  /// Numeric values at p.
  Tensor<double> evaluate(const expr::Point& p, const expr::FunctionTable* functions = nullptr) const;
};

/// Symbolic curvature of a metric with shared derivative caches.
class SymbolicCurvature {
 public:
  explicit SymbolicCurvature(MetricSpec g);

  const MetricSpec& metric() const { return g_; }
  const Tensor<expr::Expr>& metric_tensor() const { return gt_; }
  const Tensor<expr::Expr>& inverse_metric() const;
  const Tensor<expr::Expr>& christoffel() const;
  const TensorField& riemann_up() const;  // R^a_{bcd}
  TensorField riemann_lower() const;      // R_{abcd}
  const TensorField& ricci() const;
  const expr::Expr& ricci_scalar() const;
  TensorField trace_free_ricci() const;
  TensorField covariant_derivative(const TensorField& T) const;
  /// nabla^d Ric with new slots appended rightmost.
  const TensorField& nabla_ricci(int d) const;
  TensorField riemann_from_ricci() const;

  TensorField raise_index(const TensorField& T, int slot) const;
  TensorField lower_index(const TensorField& T, int slot) const;
  TensorField contract(const TensorField& T, int i, int j) const;

  expr::Expr deriv(const expr::Expr& e, int coord) const;

 private:
  MetricSpec g_;
  Tensor<expr::Expr> gt_;
  mutable Tensor<expr::Expr> ginv_, gamma_;
  mutable TensorField riem_, ric_;
  mutable std::deque<TensorField> nabla_;
  mutable expr::Expr scalar_;
  mutable bool have_scalar_ = false;
  mutable std::vector<expr::DiffMemo> dcache_;
};

}  // namespace curv3d
