#pragma once

// Minimal symbolic core: expression trees over named coordinates with
// exact-rational constants, shallow simplification, symbolic derivatives,
// and evaluation in exact or floating mode.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace curv3d {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

double to_double(const Rational& r);
std::string to_string(const Rational& r);

namespace expr {

enum class Kind {
  constant,
  symbol,
  function,  // user function, possibly formally differentiated
  neg,
  add,
  mul,
  div,
  pow,  // rational exponent
  sin,
  cos,
  sinh,
  cosh,
  exp,
  ln,
  sqrt,
};

bool is_elementary(Kind k);
std::string_view kind_name(Kind k);

class Node;

/// Immutable handle to a shared expression node. Copies are cheap.
class Expr {
 public:
  Expr();  // constant 0
  Expr(int v);
  Expr(long v);
  Expr(const Rational& v);

  static Expr symbol(std::string name);
  /// `derivs[i]` counts formal derivatives in argument i.
  static Expr function(std::string name, std::vector<Expr> args,
                       std::vector<int> derivs = {});

  Kind kind() const;
  const Node& node() const { return *node_; }
  const Node* id() const { return node_.get(); }
  std::size_t hash() const;

  bool is_constant() const { return kind() == Kind::constant; }
  bool is_zero() const;
  bool is_one() const;
  const Rational& constant_value() const;
  const std::string& name() const;
  const std::vector<Expr>& args() const;
  const Rational& exponent() const;
  const std::vector<int>& derivs() const;

  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<const Node> node_;
};

class Node {
 public:
  Kind kind = Kind::constant;
  Rational value;  // constant value or pow exponent
  std::string name;
  std::vector<Expr> args;
  std::vector<int> derivs;
  std::size_t hash = 0;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

Expr pow(const Expr& base, const Rational& exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr sinh(const Expr& a);
Expr cosh(const Expr& a);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sqrt(const Expr& a);
Expr apply(Kind k, const Expr& a);

bool structurally_equal(const Expr& a, const Expr& b);
std::size_t node_count(const Expr& e);  // distinct nodes of the DAG
std::string to_string(const Expr& e);
std::set<std::string> free_symbols(const Expr& e);

// ---------------------------------------------------------------- parsing

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Optional strict symbol table. Unknown identifiers raise ParseError.
struct SymbolTable {
  std::set<std::string> symbols;
  std::set<std::string> functions;
};

Expr parse_expr(std::string_view text, const SymbolTable* strict = nullptr);

// ------------------------------------------------------ calculus / rewriting

Expr differentiate(const Expr& e, const std::string& coord);
/// Persistent memo for repeated differentiation in one coordinate; keeps keys alive.
using DiffMemo = std::unordered_map<const Node*, std::pair<Expr, Expr>>;
Expr differentiate(const Expr& e, const std::string& coord, DiffMemo& memo);
Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl);

struct FunctionDef {
  std::vector<std::string> params;
  Expr body;
};
using FunctionTable = std::map<std::string, FunctionDef>;

/// Replaces bound user functions (and their formal derivatives) by bodies.
Expr bind_functions(const Expr& e, const FunctionTable& table);

// ------------------------------------------------------------- evaluation

class EvalError : public std::runtime_error {
 public:
  enum class Reason { division_by_zero, domain, unbound_symbol, unbound_function, not_exact };
  EvalError(Reason reason, const std::string& what, std::string subtree);
  Reason reason() const { return reason_; }
  const std::string& subtree() const { return subtree_; }

 private:
  Reason reason_;
  std::string subtree_;
};

/// A numeric value that is either an exact rational or a double.
class Number {
 public:
  Number() : v_(0.0) {}
  Number(double d) : v_(d) {}
  Number(const Rational& r) : v_(r) {}
  Number(int i) : v_(Rational(i)) {}

  bool exact() const { return std::holds_alternative<Rational>(v_); }
  const Rational& rational() const { return std::get<Rational>(v_); }
  double to_double() const;
  std::string to_string() const;

 private:
  std::variant<Rational, double> v_;
};

class Point {
 public:
  Point() = default;
  Point(std::initializer_list<std::pair<const std::string, Number>> init) : values_(init) {}

  void set(const std::string& name, Number v) { values_[name] = std::move(v); }
  bool contains(const std::string& name) const { return values_.count(name) > 0; }
  const Number& at(const std::string& name) const;
  bool all_exact() const;
  const std::map<std::string, Number>& values() const { return values_; }

  /// Parses "t=0,r=1,phi=1/2".
  static Point parse(std::string_view text);

 private:
  std::map<std::string, Number> values_;
};

enum class Mode { exact, floating };

Number evaluate(const Expr& e, const Point& p, Mode mode, const FunctionTable* functions = nullptr);
double evaluate_float(const Expr& e, const Point& p, const FunctionTable* functions = nullptr);
Rational evaluate_exact(const Expr& e, const Point& p, const FunctionTable* functions = nullptr);

/// Evaluates a batch sharing one memo table, so common subtrees are visited once.
std::vector<double> evaluate_many(const std::vector<Expr>& es, const Point& p,
                                  const FunctionTable* functions = nullptr);

}  // namespace expr
}  // namespace curv3d
