#include "curv3d/tensor.hpp"

#include <Eigen/Dense>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace curv3d {

using expr::Expr;

MetricSpec::MetricSpec(std::vector<std::string> coordinates, std::vector<Expr> components)
    : dim(static_cast<int>(coordinates.size())), coords(std::move(coordinates)), g(std::move(components)) {
  if (g.size() != static_cast<std::size_t>(dim * dim)) throw std::invalid_argument("metric needs dim*dim components");
  signature = "-" + std::string(static_cast<std::size_t>(dim - 1), '+');
}

void MetricSpec::set(int a, int b, const Expr& e) {
  g[static_cast<std::size_t>(a * dim + b)] = e;
  g[static_cast<std::size_t>(b * dim + a)] = e;
}

Tensor<Expr> MetricSpec::tensor() const {
  Tensor<Expr> t(dim, {Variance::covariant, Variance::covariant}, Expr(0));
  t.data() = g;
  return t;
}

void MetricSpec::check_at(const expr::Point& p) const {
  Eigen::MatrixXd m(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      if (!expr::structurally_equal((*this)(a, b), (*this)(b, a)))
        throw DomainError("metric is not symmetric");
      m(a, b) = expr::evaluate_float((*this)(a, b), p, &functions);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const auto& ev = es.eigenvalues();
  double scale = ev.cwiseAbs().maxCoeff();
  int negative = 0;
  for (int i = 0; i < dim; ++i) {
    if (std::abs(ev(i)) <= 1e-12 * std::max(scale, 1e-300)) throw DomainError("metric is degenerate at the point");
    if (ev(i) < 0) ++negative;
  }
  int expected = static_cast<int>(std::count(signature.begin(), signature.end(), '-'));
  if (negative != expected) throw DomainError("metric signature does not match '" + signature + "'");
}

namespace {

expr::FunctionDef parse_function(const std::vector<std::string>& params, const std::string& body) {
  return {params, expr::parse_expr(body)};
}

}  // namespace

MetricSpec MetricSpec::from_json(const nlohmann::json& j) {
  MetricSpec m;
  m.coords = j.at("coordinates").get<std::vector<std::string>>();
  m.dim = j.value("dimension", static_cast<int>(m.coords.size()));
  if (m.dim != static_cast<int>(m.coords.size())) throw std::invalid_argument("dimension does not match coordinates");
  m.signature = j.value("signature", "-" + std::string(static_cast<std::size_t>(m.dim - 1), '+'));
  if (static_cast<int>(m.signature.size()) != m.dim) throw std::invalid_argument("signature length mismatch");
  m.g.assign(static_cast<std::size_t>(m.dim * m.dim), Expr(0));

  expr::SymbolTable table;
  table.symbols.insert(m.coords.begin(), m.coords.end());
  if (j.contains("functions")) {
    for (const auto& [key, val] : j.at("functions").items()) {
      std::string name = key;
      std::vector<std::string> params;
      std::string body;
      auto paren = key.find('(');
      if (paren != std::string::npos) {
        name = key.substr(0, paren);
        std::string inner = key.substr(paren + 1, key.rfind(')') - paren - 1);
        std::stringstream ss(inner);
        for (std::string item; std::getline(ss, item, ',');) {
          item.erase(0, item.find_first_not_of(' '));
          item.erase(item.find_last_not_of(' ') + 1);
          params.push_back(item);
        }
        body = val.get<std::string>();
      } else {
        params = val.at("args").get<std::vector<std::string>>();
        body = val.at("body").get<std::string>();
      }
      m.functions[name] = parse_function(params, body);
      table.functions.insert(name);
    }
  }
  if (j.contains("formal_functions"))
    for (const auto& f : j.at("formal_functions")) table.functions.insert(f.get<std::string>());

  std::vector<bool> seen(static_cast<std::size_t>(m.dim * m.dim), false);
  for (const auto& [key, val] : j.at("components").items()) {
    if (key.rfind("g_", 0) != 0) throw std::invalid_argument("component key must start with g_: " + key);
    std::string rest = key.substr(2);
    int found_a = -1, found_b = -1;
    for (int a = 0; a < m.dim; ++a) {
      const auto& ca = m.coords[static_cast<std::size_t>(a)];
      if (rest.rfind(ca, 0) != 0) continue;
      std::string tail = rest.substr(ca.size());
      for (int b = 0; b < m.dim; ++b)
        if (tail == m.coords[static_cast<std::size_t>(b)]) {
          if (found_a >= 0) throw std::invalid_argument("ambiguous component key " + key);
          found_a = a;
          found_b = b;
        }
    }
    if (found_a < 0) throw std::invalid_argument("unknown component key " + key);
    Expr e = expr::parse_expr(val.get<std::string>(), &table);
    auto ia = static_cast<std::size_t>(found_a * m.dim + found_b);
    auto ib = static_cast<std::size_t>(found_b * m.dim + found_a);
    if (seen[ia] && !expr::structurally_equal(m.g[ia], e))
      throw std::invalid_argument("conflicting symmetric entries for " + key);
    m.set(found_a, found_b, e);
    seen[ia] = seen[ib] = true;
  }
  return m;
}

MetricSpec MetricSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open metric file " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

nlohmann::json MetricSpec::to_json() const {
  nlohmann::json j;
  j["dimension"] = dim;
  j["coordinates"] = coords;
  j["signature"] = signature;
  nlohmann::json comps = nlohmann::json::object();
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b)
      if (!(*this)(a, b).is_zero())
        comps["g_" + coords[static_cast<std::size_t>(a)] + coords[static_cast<std::size_t>(b)]] =
            expr::to_string((*this)(a, b));
  j["components"] = comps;
  if (!functions.empty()) {
    nlohmann::json fns = nlohmann::json::object();
    for (const auto& [name, def] : functions) fns[name] = {{"args", def.params}, {"body", expr::to_string(def.body)}};
    j["functions"] = fns;
  }
  return j;
}

MetricSpec MetricSpec::minkowski() {
  MetricSpec m({"t", "x", "y"}, std::vector<Expr>(9, Expr(0)));
  m.set(0, 0, Expr(-1));
  m.set(1, 1, Expr(1));
  m.set(2, 2, Expr(1));
  return m;
}

MetricSpec MetricSpec::godel_like(const Expr& H, const Expr& D) {
  MetricSpec m({"t", "r", "phi"}, std::vector<Expr>(9, Expr(0)));
  m.set(0, 0, Expr(-1));
  m.set(0, 2, -H);
  m.set(1, 1, Expr(1));
  m.set(2, 2, D * D - H * H);
  return m;
}

MetricSpec MetricSpec::de_sitter(const Rational& h) {
  MetricSpec m({"t", "x", "y"}, std::vector<Expr>(9, Expr(0)));
  Expr a = expr::exp(Expr(Rational(2 * h)) * Expr::symbol("t"));
  m.set(0, 0, Expr(-1));
  m.set(1, 1, a);
  m.set(2, 2, a);
  return m;
}

MetricSpec MetricSpec::random_polynomial(std::uint64_t seed, int degree, const Rational& amplitude) {
  MetricSpec m = minkowski();
  std::mt19937_64 rng(seed);
  Rational scaled = amplitude * 64;
  auto kmax = static_cast<int>(boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled));
  std::uniform_int_distribution<int> pick(-kmax, kmax);
  std::vector<Expr> monomials;
  Expr t = Expr::symbol("t"), x = Expr::symbol("x"), y = Expr::symbol("y");
  for (int d = 1; d <= degree; ++d)
    for (int i = d; i >= 0; --i)
      for (int j = d - i; j >= 0; --j) {
        int k = d - i - j;
        monomials.push_back(expr::pow(t, i) * expr::pow(x, j) * expr::pow(y, k));
      }
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      Expr e = m(a, b);
      for (const auto& mono : monomials) {
        int c = pick(rng);
        if (c != 0) e = e + Expr(Rational(c, 64)) * mono;
      }
      m.set(a, b, e);
    }
  return m;
}

MetricSpec pullback(const MetricSpec& g, const std::vector<Expr>& phi) {
  if (static_cast<int>(phi.size()) != g.dim) throw std::invalid_argument("pullback needs one function per coordinate");
  std::map<std::string, Expr> repl;
  for (int a = 0; a < g.dim; ++a) repl[g.coords[static_cast<std::size_t>(a)]] = phi[static_cast<std::size_t>(a)];
  std::vector<Expr> jac(static_cast<std::size_t>(g.dim * g.dim));
  for (int a = 0; a < g.dim; ++a)
    for (int mu = 0; mu < g.dim; ++mu)
      jac[static_cast<std::size_t>(a * g.dim + mu)] = expr::differentiate(phi[static_cast<std::size_t>(a)], g.coords[static_cast<std::size_t>(mu)]);
  std::vector<Expr> gx;
  for (const auto& e : g.g) gx.push_back(expr::substitute(e, repl));
  MetricSpec out = g;
  for (int mu = 0; mu < g.dim; ++mu)
    for (int nu = mu; nu < g.dim; ++nu) {
      Expr acc(0);
      for (int a = 0; a < g.dim; ++a)
        for (int b = 0; b < g.dim; ++b)
          acc = acc + jac[static_cast<std::size_t>(a * g.dim + mu)] * jac[static_cast<std::size_t>(b * g.dim + nu)] *
                          gx[static_cast<std::size_t>(a * g.dim + b)];
      out.set(mu, nu, acc);
    }
  return out;
}

Tensor<double> TensorField::evaluate(const expr::Point& p, const expr::FunctionTable* functions) const {
  Tensor<double> out(t.dim(), t.slots(), 0.0);
  out.data() = expr::evaluate_many(t.data(), p, functions);
  return out;
}

// ----------------------------------------------------- SymbolicCurvature

SymbolicCurvature::SymbolicCurvature(MetricSpec g)
    : g_(std::move(g)), gt_(g_.tensor()), dcache_(static_cast<std::size_t>(g_.dim)) {}

Expr SymbolicCurvature::deriv(const Expr& e, int coord) const {
  return expr::differentiate(e, g_.coords[static_cast<std::size_t>(coord)], dcache_[static_cast<std::size_t>(coord)]);
}

const Tensor<Expr>& SymbolicCurvature::inverse_metric() const {
  if (ginv_.rank() == 0) ginv_ = talg::inverse(gt_);
  return ginv_;
}

const Tensor<Expr>& SymbolicCurvature::christoffel() const {
  if (gamma_.rank() == 0)
    gamma_ = talg::christoffel(gt_, inverse_metric(), [this](const Expr& e, int c) { return deriv(e, c); });
  return gamma_;
}

const TensorField& SymbolicCurvature::riemann_up() const {
  if (riem_.t.rank() == 0) {
    riem_.t = talg::riemann(christoffel(), [this](const Expr& e, int c) { return deriv(e, c); });
    riem_.antisymmetric = {{2, 3}};
  }
  return riem_;
}

TensorField SymbolicCurvature::riemann_lower() const {
  TensorField out;
  out.t = talg::lower_index(riemann_up().t, gt_, 0);
  out.antisymmetric = {{0, 1}, {2, 3}};
  return out;
}

const TensorField& SymbolicCurvature::ricci() const {
  if (ric_.t.rank() == 0) {
    ric_.t = talg::ricci(riemann_up().t);
    ric_.symmetric = {{0, 1}};
  }
  return ric_;
}

const Expr& SymbolicCurvature::ricci_scalar() const {
  if (!have_scalar_) {
    scalar_ = talg::trace2(ricci().t, inverse_metric());
    have_scalar_ = true;
  }
  return scalar_;
}

TensorField SymbolicCurvature::trace_free_ricci() const {
  TensorField out = ricci();
  Expr third = ricci_scalar() / Expr(3);
  if (g_.dim != 3) third = ricci_scalar() / Expr(g_.dim);
  for (std::size_t i = 0; i < out.t.size(); ++i) out.t[i] = out.t[i] - third * gt_[i];
  return out;
}

TensorField SymbolicCurvature::covariant_derivative(const TensorField& T) const {
  TensorField out;
  out.t = talg::covariant_derivative(T.t, christoffel(), [this](const Expr& e, int c) { return deriv(e, c); });
  out.deriv_order = T.deriv_order + 1;
  out.symmetric = T.symmetric;
  out.antisymmetric = T.antisymmetric;
  return out;
}

const TensorField& SymbolicCurvature::nabla_ricci(int d) const {
  if (nabla_.empty()) nabla_.push_back(ricci());
  while (static_cast<int>(nabla_.size()) <= d) nabla_.push_back(covariant_derivative(nabla_.back()));
  return nabla_[static_cast<std::size_t>(d)];
}

TensorField SymbolicCurvature::riemann_from_ricci() const {
  TensorField out;
  out.t = talg::riemann_from_ricci(gt_, ricci().t, ricci_scalar());
  out.antisymmetric = {{0, 1}, {2, 3}};
  return out;
}

TensorField SymbolicCurvature::raise_index(const TensorField& T, int slot) const {
  TensorField out = T;
  out.t = talg::raise_index(T.t, inverse_metric(), slot);
  return out;
}

TensorField SymbolicCurvature::lower_index(const TensorField& T, int slot) const {
  TensorField out = T;
  out.t = talg::lower_index(T.t, gt_, slot);
  return out;
}

TensorField SymbolicCurvature::contract(const TensorField& T, int i, int j) const {
  TensorField out;
  out.t = talg::contract(T.t, i, j, gt_, inverse_metric());
  out.deriv_order = std::max(0, T.deriv_order - 1);
  return out;
}

}  // namespace curv3d
