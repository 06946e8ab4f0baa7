#include "curv3d/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace curv3d {

namespace {

void enumerate_degree(int nvars, int deg, std::vector<std::uint8_t>& cur, int var,
                      std::vector<std::vector<std::uint8_t>>& out) {
  if (var == nvars - 1) {
    cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(deg);
    out.push_back(cur);
    return;
  }
  for (int k = deg; k >= 0; --k) {
    cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(k);
    enumerate_degree(nvars, deg - k, cur, var + 1, out);
  }
}

}  // namespace

JetSpace::JetSpace(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 1 || order < 0) throw std::invalid_argument("invalid jet space");
  std::vector<std::uint8_t> cur(static_cast<std::size_t>(nvars), 0);
  for (int d = 0; d <= order; ++d) {
    enumerate_degree(nvars, d, cur, 0, exps_);
    degree_end_.push_back(exps_.size());
  }
  for (const auto& e : exps_) {
    int s = 0;
    for (auto v : e) s += v;
    degree_.push_back(s);
  }
  std::vector<std::vector<Product>> by_degree(static_cast<std::size_t>(order) + 1);
  std::vector<std::uint8_t> sum(static_cast<std::size_t>(nvars));
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    for (std::size_t j = 0; j < exps_.size(); ++j) {
      int d = degree_[i] + degree_[j];
      if (d > order) continue;
      for (std::size_t v = 0; v < sum.size(); ++v) sum[v] = static_cast<std::uint8_t>(exps_[i][v] + exps_[j][v]);
      by_degree[static_cast<std::size_t>(d)].push_back(
          {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(index(sum))});
    }
  }
  for (const auto& bucket : by_degree) {
    products_.insert(products_.end(), bucket.begin(), bucket.end());
    product_end_.push_back(products_.size());
  }
  deriv_.resize(static_cast<std::size_t>(nvars));
  for (int v = 0; v < nvars; ++v) {
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      int k = exps_[i][static_cast<std::size_t>(v)];
      if (k == 0) continue;
      auto lower = exps_[i];
      --lower[static_cast<std::size_t>(v)];
      deriv_[static_cast<std::size_t>(v)].push_back(
          {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(index(lower)), static_cast<double>(k)});
    }
  }
}

long JetSpace::index(const std::vector<std::uint8_t>& e) const {
  int d = 0;
  for (auto v : e) d += v;
  if (d > order_) return -1;
  std::size_t lo = d == 0 ? 0 : degree_end_[static_cast<std::size_t>(d) - 1];
  std::size_t hi = degree_end_[static_cast<std::size_t>(d)];
  // Within one degree, monomials are sorted by descending exponent tuple.
  auto it = std::lower_bound(exps_.begin() + static_cast<long>(lo), exps_.begin() + static_cast<long>(hi), e,
                             [](const auto& a, const auto& b) { return a > b; });
  if (it == exps_.begin() + static_cast<long>(hi) || *it != e) return -1;
  return it - exps_.begin();
}

std::shared_ptr<const JetSpace> JetSpace::get(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot = std::make_shared<const JetSpace>(nvars, order);
  return slot;
}

// -------------------------------------------------------------------- Jet

Jet::Jet(std::shared_ptr<const JetSpace> space, double constant)
    : space_(std::move(space)), valid_(space_->order()), c_(space_->size(), 0.0) {
  c_[0] = constant;
}

Jet Jet::variable(std::shared_ptr<const JetSpace> space, int var, double at) {
  Jet j(std::move(space), at);
  if (j.space_->order() >= 1) {
    std::vector<std::uint8_t> e(static_cast<std::size_t>(j.space_->nvars()), 0);
    e[static_cast<std::size_t>(var)] = 1;
    j.c_[static_cast<std::size_t>(j.space_->index(e))] = 1.0;
  }
  return j;
}

double Jet::gradient(int var) const {
  if (valid_ < 1) throw std::domain_error("jet gradient beyond valid order");
  std::vector<std::uint8_t> e(static_cast<std::size_t>(space_->nvars()), 0);
  e[static_cast<std::size_t>(var)] = 1;
  return c_[static_cast<std::size_t>(space_->index(e))];
}

Jet Jet::derivative(int var) const {
  Jet out(space_, 0.0);
  out.valid_ = valid_ - 1;
  if (out.valid_ < 0) throw std::domain_error("jet differentiated beyond its valid order");
  for (const auto& t : space_->derivative(var)) out.c_[t.to] += t.factor * c_[t.from];
  return out.truncated(out.valid_);
}

Jet Jet::truncated(int order) const {
  Jet out = *this;
  out.valid_ = std::min(valid_, order);
  std::fill(out.c_.begin() + static_cast<long>(space_->size_upto(out.valid_)), out.c_.end(), 0.0);
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  valid_ = std::min(valid_, o.valid_);
  std::size_t n = space_->size_upto(valid_);
  for (std::size_t i = 0; i < n; ++i) c_[i] += o.c_[i];
  std::fill(c_.begin() + static_cast<long>(n), c_.end(), 0.0);
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  valid_ = std::min(valid_, o.valid_);
  std::size_t n = space_->size_upto(valid_);
  for (std::size_t i = 0; i < n; ++i) c_[i] -= o.c_[i];
  std::fill(c_.begin() + static_cast<long>(n), c_.end(), 0.0);
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Jet Jet::operator-() const {
  Jet out = *this;
  for (auto& v : out.c_) v = -v;
  return out;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet out(a.space_, 0.0);
  out.valid_ = std::min(a.valid_, b.valid_);
  const auto& prods = a.space_->products();
  std::size_t n = a.space_->products_upto(out.valid_);
  const double* ac = a.c_.data();
  const double* bc = b.c_.data();
  double* oc = out.c_.data();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = prods[k];
    oc[p.out] += ac[p.a] * bc[p.b];
  }
  return out;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet Jet::compose(const std::vector<double>& d) const {
  // Horner in delta = a - a0: sum_k d[k]/k! delta^k.
  Jet delta = *this;
  delta.c_[0] = 0.0;
  int n = valid_;
  Jet out(space_, 0.0);
  out.valid_ = valid_;
  double fact = 1.0;
  std::vector<double> coef(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    if (k > 0) fact *= k;
    coef[static_cast<std::size_t>(k)] = d[static_cast<std::size_t>(k)] / fact;
  }
  out.c_[0] = coef[static_cast<std::size_t>(n)];
  for (int k = n - 1; k >= 0; --k) {
    out = out * delta;
    out.c_[0] += coef[static_cast<std::size_t>(k)];
  }
  out.valid_ = valid_;
  return out;
}

Jet pow(const Jet& a, double q) {
  double a0 = a.value();
  int n = a.valid();
  std::vector<double> d(static_cast<std::size_t>(n) + 1);
  double fall = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (fall == 0.0) {
      d[static_cast<std::size_t>(k)] = 0.0;
    } else {
      if (a0 == 0.0 && q - k < 0) throw std::domain_error("jet power singular at zero");
      d[static_cast<std::size_t>(k)] = fall * std::pow(a0, q - k);
    }
    fall *= (q - k);
  }
  return a.compose(d);
}

Jet reciprocal(const Jet& a) {
  if (a.value() == 0.0) throw std::domain_error("jet reciprocal of zero");
  return pow(a, -1.0);
}

Jet sqrt(const Jet& a) {
  if (a.value() <= 0.0) throw std::domain_error("jet sqrt of non-positive value");
  return pow(a, 0.5);
}

Jet exp(const Jet& a) {
  return a.compose(std::vector<double>(static_cast<std::size_t>(a.valid()) + 1, std::exp(a.value())));
}

Jet log(const Jet& a) {
  double a0 = a.value();
  if (a0 <= 0.0) throw std::domain_error("jet log of non-positive value");
  std::vector<double> d(static_cast<std::size_t>(a.valid()) + 1);
  d[0] = std::log(a0);
  double f = 1.0;  // (k-1)!
  for (int k = 1; k <= a.valid(); ++k) {
    if (k > 1) f *= (k - 1);
    d[static_cast<std::size_t>(k)] = ((k % 2) ? 1.0 : -1.0) * f / std::pow(a0, k);
  }
  return a.compose(d);
}

namespace {

Jet cyclic(const Jet& a, double v0, double v1, double v2, double v3) {
  double cyc[4] = {v0, v1, v2, v3};
  std::vector<double> d(static_cast<std::size_t>(a.valid()) + 1);
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = cyc[k % 4];
  return a.compose(d);
}

}  // namespace

Jet sin(const Jet& a) {
  double s = std::sin(a.value()), c = std::cos(a.value());
  return cyclic(a, s, c, -s, -c);
}

Jet cos(const Jet& a) {
  double s = std::sin(a.value()), c = std::cos(a.value());
  return cyclic(a, c, -s, -c, s);
}

Jet sinh(const Jet& a) {
  double s = std::sinh(a.value()), c = std::cosh(a.value());
  return cyclic(a, s, c, s, c);
}

Jet cosh(const Jet& a) {
  double s = std::sinh(a.value()), c = std::cosh(a.value());
  return cyclic(a, c, s, c, s);
}

// -------------------------------------------------------- Expr evaluation

namespace expr {

thread_local std::shared_ptr<const JetSpace> EvalTraits<Jet>::space;

Jet EvalTraits<Jet>::div(const Jet& a, const Jet& b, const Expr& where) {
  if (b.value() == 0.0) throw EvalError(EvalError::Reason::division_by_zero, "division by zero", to_string(where));
  return a / b;
}

Jet EvalTraits<Jet>::pow(const Jet& a, const Rational& q, const Expr& where) {
  if (denominator(q) == 1) {
    long n = numerator(q).convert_to<long>();
    if (n < 0 && a.value() == 0.0)
      throw EvalError(EvalError::Reason::division_by_zero, "zero to a negative power", to_string(where));
    if (n >= 0 && n <= 8) {
      Jet out(a.space_ptr(), 1.0);
      for (long i = 0; i < n; ++i) out = out * a;
      return out;
    }
    return curv3d::pow(a, static_cast<double>(n));
  }
  if (a.value() <= 0.0)
    throw EvalError(EvalError::Reason::domain, "fractional power of a non-positive number", to_string(where));
  return curv3d::pow(a, to_double(q));
}

Jet EvalTraits<Jet>::apply(Kind k, const Jet& a, const Expr& where) {
  switch (k) {
    case Kind::sin: return curv3d::sin(a);
    case Kind::cos: return curv3d::cos(a);
    case Kind::sinh: return curv3d::sinh(a);
    case Kind::cosh: return curv3d::cosh(a);
    case Kind::exp: return curv3d::exp(a);
    case Kind::ln:
      if (a.value() <= 0.0)
        throw EvalError(EvalError::Reason::domain, "logarithm of a non-positive number", to_string(where));
      return curv3d::log(a);
    case Kind::sqrt:
      if (a.value() <= 0.0)
        throw EvalError(EvalError::Reason::domain, "square root at a non-positive number", to_string(where));
      return curv3d::sqrt(a);
    default:
      throw std::logic_error("not an elementary function");
  }
}

}  // namespace expr

namespace {

struct SpaceScope {
  explicit SpaceScope(std::shared_ptr<const JetSpace> s) : saved(expr::EvalTraits<Jet>::space) {
    expr::EvalTraits<Jet>::space = std::move(s);
  }
  ~SpaceScope() { expr::EvalTraits<Jet>::space = saved; }
  std::shared_ptr<const JetSpace> saved;
};

}  // namespace

std::vector<Jet> taylor_many(const std::vector<expr::Expr>& es, const std::vector<std::string>& coords,
                             const expr::Point& p, int order, const expr::FunctionTable* functions) {
  auto space = JetSpace::get(static_cast<int>(coords.size()), order);
  SpaceScope scope(space);
  std::map<std::string, Jet> vars;
  for (std::size_t i = 0; i < coords.size(); ++i)
    vars.emplace(coords[i], Jet::variable(space, static_cast<int>(i), p.at(coords[i]).to_double()));
  expr::Evaluator<Jet> ev(
      [&](const std::string& s) -> Jet {
        auto it = vars.find(s);
        if (it != vars.end()) return it->second;
        return Jet(space, p.at(s).to_double());
      },
      functions);
  std::vector<Jet> out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(ev(e));
  return out;
}

Jet taylor(const expr::Expr& e, const std::vector<std::string>& coords, const expr::Point& p, int order,
           const expr::FunctionTable* functions) {
  return taylor_many({e}, coords, p, order, functions).front();
}

}  // namespace curv3d
