#pragma once

// Generic tree evaluation over any scalar type with an EvalTraits
// specialization (double, Rational, Jet). Shared subtrees are evaluated once.

#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "curv3d/expr.hpp"

namespace curv3d::expr {

template <class T>
struct EvalTraits;  // from_rational, add, sub, mul, div, neg, pow, apply(Kind)

template <class T>
class Evaluator {
 public:
  using Lookup = std::function<T(const std::string&)>;

  Evaluator(Lookup lookup, const FunctionTable* functions)
      : lookup_(std::move(lookup)), functions_(functions) {}

  T operator()(const Expr& e) { return eval(e); }

 private:
  using Traits = EvalTraits<T>;

  T eval(const Expr& e) {
    auto it = memo_.find(e.id());
    if (it != memo_.end()) return it->second;
    T v = compute(e);
    memo_.emplace(e.id(), v);
    return v;
  }

  T compute(const Expr& e) {
    const Node& n = e.node();
    switch (n.kind) {
      case Kind::constant:
        return Traits::from_rational(n.value);
      case Kind::symbol:
        return lookup_(n.name);
      case Kind::neg:
        return Traits::neg(eval(n.args[0]));
      case Kind::add:
        return Traits::add(eval(n.args[0]), eval(n.args[1]));
      case Kind::mul:
        return Traits::mul(eval(n.args[0]), eval(n.args[1]));
      case Kind::div:
        return Traits::div(eval(n.args[0]), eval(n.args[1]), e);
      case Kind::pow:
        return Traits::pow(eval(n.args[0]), n.value, e);
      case Kind::function:
        return call(e);
      default:
        return Traits::apply(n.kind, eval(n.args[0]), e);
    }
  }

  T call(const Expr& e) {
    const Node& n = e.node();
    const FunctionDef* def = nullptr;
    if (functions_ != nullptr) {
      auto it = functions_->find(n.name);
      if (it != functions_->end()) def = &it->second;
    }
    if (def == nullptr) {
      throw EvalError(EvalError::Reason::unbound_function, "unbound function '" + n.name + "'",
                      to_string(e));
    }
    if (def->params.size() != n.args.size()) {
      throw EvalError(EvalError::Reason::unbound_function,
                      "arity mismatch for function '" + n.name + "'", to_string(e));
    }
    const Expr& body = derived_body(n.name, *def, n.derivs);
    std::map<std::string, T> bound;
    for (std::size_t i = 0; i < n.args.size(); ++i) bound.emplace(def->params[i], eval(n.args[i]));
    Evaluator inner(
        [&bound, this](const std::string& s) -> T {
          auto it = bound.find(s);
          if (it != bound.end()) return it->second;
          return lookup_(s);
        },
        functions_);
    return inner(body);
  }

  const Expr& derived_body(const std::string& name, const FunctionDef& def,
                           const std::vector<int>& derivs) {
    auto key = std::make_pair(name, derivs);
    auto it = bodies_.find(key);
    if (it != bodies_.end()) return it->second;
    Expr body = def.body;
    for (std::size_t i = 0; i < derivs.size(); ++i)
      for (int k = 0; k < derivs[i]; ++k) body = differentiate(body, def.params[i]);
    return bodies_.emplace(key, body).first->second;
  }

  Lookup lookup_;
  const FunctionTable* functions_;
  std::unordered_map<const Node*, T> memo_;
  std::map<std::pair<std::string, std::vector<int>>, Expr> bodies_;
};

template <class T>
T evaluate_as(const Expr& e, typename Evaluator<T>::Lookup lookup,
              const FunctionTable* functions = nullptr) {
  Evaluator<T> ev(std::move(lookup), functions);
  return ev(e);
}

template <>
struct EvalTraits<double> {
  static double from_rational(const Rational& r) { return to_double(r); }
  static double neg(double a) { return -a; }
  static double add(double a, double b) { return a + b; }
  static double mul(double a, double b) { return a * b; }
  static double div(double a, double b, const Expr& where);
  static double pow(double a, const Rational& q, const Expr& where);
  static double apply(Kind k, double a, const Expr& where);
};

template <>
struct EvalTraits<Rational> {
  static Rational from_rational(const Rational& r) { return r; }
  static Rational neg(const Rational& a) { return -a; }
  static Rational add(const Rational& a, const Rational& b) { return a + b; }
  static Rational mul(const Rational& a, const Rational& b) { return a * b; }
  static Rational div(const Rational& a, const Rational& b, const Expr& where);
  static Rational pow(const Rational& a, const Rational& q, const Expr& where);
  static Rational apply(Kind k, const Rational& a, const Expr& where);
};

}  // namespace curv3d::expr
