#pragma once

// Truncated multivariate Taylor polynomials. A Jet carries the coefficients
// of monomials in a fixed JetSpace plus the order up to which they are exact.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "curv3d/expr.hpp"
#include "curv3d/expr_eval.hpp"

namespace curv3d {

class JetSpace {
 public:
  static std::shared_ptr<const JetSpace> get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  std::size_t size() const { return exps_.size(); }
  /// Number of monomials of total degree <= d.
  std::size_t size_upto(int d) const { return degree_end_[static_cast<std::size_t>(std::min(d, order_))]; }
  const std::vector<std::uint8_t>& exponents(std::size_t i) const { return exps_[i]; }
  int degree(std::size_t i) const { return degree_[i]; }
  /// Index of a monomial, or -1 when it is outside the space.
  long index(const std::vector<std::uint8_t>& e) const;

  struct Product {
    std::uint32_t a, b, out;
  };
  /// Products whose result has degree <= d form a prefix of this list.
  const std::vector<Product>& products() const { return products_; }
  std::size_t products_upto(int d) const { return product_end_[static_cast<std::size_t>(std::min(d, order_))]; }

  struct DerivTerm {
    std::uint32_t from, to;
    double factor;
  };
  const std::vector<DerivTerm>& derivative(int var) const { return deriv_[static_cast<std::size_t>(var)]; }

  JetSpace(int nvars, int order);

 private:
  int nvars_, order_;
  std::vector<std::vector<std::uint8_t>> exps_;
  std::vector<int> degree_;
  std::vector<std::size_t> degree_end_;
  std::vector<Product> products_;
  std::vector<std::size_t> product_end_;
  std::vector<std::vector<DerivTerm>> deriv_;
};

class Jet {
 public:
  Jet() = default;
  Jet(std::shared_ptr<const JetSpace> space, double constant);
  static Jet variable(std::shared_ptr<const JetSpace> space, int var, double at);

  const JetSpace& space() const { return *space_; }
  const std::shared_ptr<const JetSpace>& space_ptr() const { return space_; }
  bool empty() const { return space_ == nullptr; }
  int valid() const { return valid_; }
  double value() const { return c_.empty() ? 0.0 : c_[0]; }
  double coeff(std::size_t i) const { return c_[i]; }
  double& coeff(std::size_t i) { return c_[i]; }
  const std::vector<double>& coeffs() const { return c_; }
  /// First-order partial derivative at the expansion point.
  double gradient(int var) const;

  Jet derivative(int var) const;
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);
  Jet operator-() const;

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(const Jet& a, const Jet& b);
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  /// Composition f(a) given f and its derivatives at a.value(): d[k] = f^(k)(a0).
  Jet compose(const std::vector<double>& d) const;

 private:
  std::shared_ptr<const JetSpace> space_;
  int valid_ = 0;
  std::vector<double> c_;
  friend Jet pow(const Jet& a, double q);
};

Jet pow(const Jet& a, double q);
Jet reciprocal(const Jet& a);
Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);

namespace expr {

template <>
struct EvalTraits<Jet> {
  static thread_local std::shared_ptr<const JetSpace> space;
  static Jet from_rational(const Rational& r) { return Jet(space, to_double(r)); }
  static Jet neg(const Jet& a) { return -a; }
  static Jet add(const Jet& a, const Jet& b) { return a + b; }
  static Jet mul(const Jet& a, const Jet& b) { return a * b; }
  static Jet div(const Jet& a, const Jet& b, const Expr& where);
  static Jet pow(const Jet& a, const Rational& q, const Expr& where);
  static Jet apply(Kind k, const Jet& a, const Expr& where);
};

}  // namespace expr

/// Taylor expansion of e around p in the given coordinates, to `order`.
Jet taylor(const expr::Expr& e, const std::vector<std::string>& coords, const expr::Point& p, int order,
           const expr::FunctionTable* functions = nullptr);
std::vector<Jet> taylor_many(const std::vector<expr::Expr>& es, const std::vector<std::string>& coords,
                             const expr::Point& p, int order, const expr::FunctionTable* functions = nullptr);

}  // namespace curv3d
