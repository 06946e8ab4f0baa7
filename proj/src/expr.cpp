#include "curv3d/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "curv3d/expr_eval.hpp"

namespace curv3d {

double to_double(const Rational& r) { return static_cast<double>(r); }

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

namespace expr {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t rational_hash(const Rational& r) {
  return std::hash<std::string>{}(curv3d::to_string(r));
}

Expr make(Kind kind, std::vector<Expr> args, Rational value = 0, std::string name = {},
          std::vector<int> derivs = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->value = std::move(value);
  n->name = std::move(name);
  n->args = std::move(args);
  n->derivs = std::move(derivs);
  std::size_t h = static_cast<std::size_t>(kind) * 1315423911u;
  if (kind == Kind::constant || kind == Kind::pow) h = mix(h, rational_hash(n->value));
  if (!n->name.empty()) h = mix(h, std::hash<std::string>{}(n->name));
  for (const auto& a : n->args) h = mix(h, a.hash());
  for (int d : n->derivs) h = mix(h, static_cast<std::size_t>(d) + 17);
  n->hash = h;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

bool is_integer(const Rational& r) { return denominator(r) == 1; }

// Exact integer k-th root, if one exists.
std::optional<BigInt> exact_root(const BigInt& v, unsigned k) {
  if (v < 0) {
    if (k % 2 == 0) return std::nullopt;
    auto r = exact_root(-v, k);
    if (!r) return std::nullopt;
    return BigInt(-*r);
  }
  if (v < 2) return v;
  BigInt lo = 0, hi = 1;
  while (boost::multiprecision::pow(hi, k) <= v) hi *= 2;
  while (hi - lo > 1) {
    BigInt mid = (lo + hi) / 2;
    if (boost::multiprecision::pow(mid, k) <= v)
      lo = mid;
    else
      hi = mid;
  }
  if (boost::multiprecision::pow(lo, k) == v) return lo;
  return std::nullopt;
}

std::optional<Rational> rational_power(const Rational& base, const Rational& q) {
  BigInt num = numerator(q), den = denominator(q);
  if (base == 0) {
    if (num <= 0) return std::nullopt;
    return Rational(0);
  }
  if (den > 64 || boost::multiprecision::abs(num) > 4096) return std::nullopt;
  unsigned k = den.convert_to<unsigned>();
  auto rn = exact_root(numerator(base), k);
  auto rd = exact_root(denominator(base), k);
  if (!rn || !rd) return std::nullopt;
  Rational root(*rn, *rd);
  long e = num.convert_to<long>();
  Rational out(1);
  Rational b = e < 0 ? Rational(1) / root : root;
  for (long i = 0; i < std::labs(e); ++i) out *= b;
  return out;
}

}  // namespace

bool is_elementary(Kind k) {
  switch (k) {
    case Kind::sin:
    case Kind::cos:
    case Kind::sinh:
    case Kind::cosh:
    case Kind::exp:
    case Kind::ln:
    case Kind::sqrt:
      return true;
    default:
      return false;
  }
}

std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::constant: return "constant";
    case Kind::symbol: return "symbol";
    case Kind::function: return "function";
    case Kind::neg: return "neg";
    case Kind::add: return "add";
    case Kind::mul: return "mul";
    case Kind::div: return "div";
    case Kind::pow: return "pow";
    case Kind::sin: return "sin";
    case Kind::cos: return "cos";
    case Kind::sinh: return "sinh";
    case Kind::cosh: return "cosh";
    case Kind::exp: return "exp";
    case Kind::ln: return "ln";
    case Kind::sqrt: return "sqrt";
  }
  return "?";
}

// ------------------------------------------------------------------- Expr

Expr::Expr() : Expr(Rational(0)) {}
Expr::Expr(int v) : Expr(Rational(v)) {}
Expr::Expr(long v) : Expr(Rational(v)) {}
Expr::Expr(const Rational& v) : node_(make(Kind::constant, {}, v).node_) {}

Expr Expr::symbol(std::string name) { return make(Kind::symbol, {}, 0, std::move(name)); }

Expr Expr::function(std::string name, std::vector<Expr> args, std::vector<int> derivs) {
  if (derivs.empty()) derivs.assign(args.size(), 0);
  if (derivs.size() != args.size()) throw std::invalid_argument("derivative vector size mismatch");
  return make(Kind::function, std::move(args), 0, std::move(name), std::move(derivs));
}

Kind Expr::kind() const { return node_->kind; }
std::size_t Expr::hash() const { return node_->hash; }
bool Expr::is_zero() const { return is_constant() && node_->value == 0; }
bool Expr::is_one() const { return is_constant() && node_->value == 1; }
const Rational& Expr::constant_value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
const Rational& Expr::exponent() const { return node_->value; }
const std::vector<int>& Expr::derivs() const { return node_->derivs; }

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  if (a.hash() != b.hash()) return false;
  const Node& x = a.node();
  const Node& y = b.node();
  if (x.kind != y.kind || x.name != y.name || x.derivs != y.derivs) return false;
  if ((x.kind == Kind::constant || x.kind == Kind::pow) && x.value != y.value) return false;
  if (x.args.size() != y.args.size()) return false;
  for (std::size_t i = 0; i < x.args.size(); ++i)
    if (!structurally_equal(x.args[i], y.args[i])) return false;
  return true;
}

std::size_t node_count(const Expr& e) {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{e.id()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    for (const auto& a : n->args) stack.push_back(a.id());
  }
  return seen.size();
}

// -------------------------------------------------- simplifying constructors

namespace {

// Splits e into (exponent, base) so that x, x^q share a base.
std::pair<Rational, Expr> power_form(const Expr& e) {
  if (e.kind() == Kind::pow) return {e.exponent(), e.args()[0]};
  return {Rational(1), e};
}

}  // namespace

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(Rational(-a.constant_value()));
  if (a.kind() == Kind::neg) return a.args()[0];
  return make(Kind::neg, {a});
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(Rational(a.constant_value() + b.constant_value()));
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return make(Kind::add, {a, b});
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(Rational(a.constant_value() * b.constant_value()));
  if (a.is_zero() || b.is_zero()) return Expr(0);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (b.is_constant()) return b * a;  // constants lead
  if (a.is_constant()) {
    if (a.constant_value() == -1) return -b;
    if (b.kind() == Kind::mul && b.args()[0].is_constant())
      return Expr(Rational(a.constant_value() * b.args()[0].constant_value())) * b.args()[1];
  }
  if (!a.is_constant()) {
    auto [pa, ba] = power_form(a);
    auto [pb, bb] = power_form(b);
    if (!ba.is_constant() && structurally_equal(ba, bb)) return pow(ba, pa + pb);
  }
  return make(Kind::mul, {a, b});
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_one()) return a;
  if (a.is_constant() && b.is_constant() && !b.is_zero())
    return Expr(Rational(a.constant_value() / b.constant_value()));
  if (a.is_zero() && !b.is_zero()) return Expr(0);
  if (b.is_constant() && !b.is_zero()) return Expr(Rational(Rational(1) / b.constant_value())) * a;
  return make(Kind::div, {a, b});
}

Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

Expr pow(const Expr& base, const Rational& q) {
  if (q == 0) return Expr(1);
  if (q == 1) return base;
  if (base.is_constant()) {
    if (auto r = rational_power(base.constant_value(), q)) return Expr(*r);
  }
  if (base.kind() == Kind::pow && is_integer(q)) return pow(base.args()[0], base.exponent() * q);
  return make(Kind::pow, {base}, q);
}

Expr apply(Kind k, const Expr& a) {
  if (a.is_zero()) {
    switch (k) {
      case Kind::sin:
      case Kind::sinh:
      case Kind::sqrt:
        return Expr(0);
      case Kind::cos:
      case Kind::cosh:
      case Kind::exp:
        return Expr(1);
      default:
        break;
    }
  }
  if (k == Kind::ln && a.is_one()) return Expr(0);
  if (k == Kind::sqrt && a.is_constant() && a.constant_value() > 0) {
    if (auto r = rational_power(a.constant_value(), Rational(1, 2))) return Expr(*r);
  }
  if (!is_elementary(k)) throw std::invalid_argument("apply: not an elementary function");
  return make(k, {a});
}

Expr sin(const Expr& a) { return apply(Kind::sin, a); }
Expr cos(const Expr& a) { return apply(Kind::cos, a); }
Expr sinh(const Expr& a) { return apply(Kind::sinh, a); }
Expr cosh(const Expr& a) { return apply(Kind::cosh, a); }
Expr exp(const Expr& a) { return apply(Kind::exp, a); }
Expr ln(const Expr& a) { return apply(Kind::ln, a); }
Expr sqrt(const Expr& a) { return apply(Kind::sqrt, a); }

// -------------------------------------------------------------- printing

namespace {

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Kind::add: return 1;
    case Kind::mul:
    case Kind::div: return 2;
    case Kind::neg: return 3;
    case Kind::pow: return 4;
    case Kind::constant: return (e.constant_value() >= 0 && is_integer(e.constant_value())) ? 5 : 3;
    default: return 5;
  }
}

void print(std::ostream& os, const Expr& e);

void print_paren(std::ostream& os, const Expr& e, bool paren) {
  if (paren) os << '(';
  print(os, e);
  if (paren) os << ')';
}

void print_exponent(std::ostream& os, const Rational& q) {
  if (q >= 0 && is_integer(q))
    os << curv3d::to_string(q);
  else
    os << '(' << curv3d::to_string(q) << ')';
}

void print(std::ostream& os, const Expr& e) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::constant: {
      if (n.value >= 0 && is_integer(n.value))
        os << curv3d::to_string(n.value);
      else
        os << '(' << curv3d::to_string(n.value) << ')';
      return;
    }
    case Kind::symbol:
      os << n.name;
      return;
    case Kind::function: {
      bool formal = false;
      for (int d : n.derivs) formal |= d != 0;
      os << n.name;
      if (formal) {
        if (n.args.size() == 1) {
          os << std::string(static_cast<std::size_t>(n.derivs[0]), '\'');
        } else {
          os << "_{";
          for (std::size_t i = 0; i < n.derivs.size(); ++i) os << (i ? "," : "") << n.derivs[i];
          os << '}';
        }
      }
      os << '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) os << ", ";
        print(os, n.args[i]);
      }
      os << ')';
      return;
    }
    case Kind::neg:
      os << '-';
      print_paren(os, n.args[0], precedence(n.args[0]) < 5);
      return;
    case Kind::add:
      print_paren(os, n.args[0], false);
      os << " + ";
      print_paren(os, n.args[1], precedence(n.args[1]) <= 1);
      return;
    case Kind::mul:
    case Kind::div:
      print_paren(os, n.args[0], precedence(n.args[0]) < 2);
      os << (n.kind == Kind::mul ? "*" : "/");
      print_paren(os, n.args[1], precedence(n.args[1]) <= 2);
      return;
    case Kind::pow:
      print_paren(os, n.args[0], precedence(n.args[0]) < 5);
      os << '^';
      print_exponent(os, n.value);
      return;
    default:
      os << kind_name(n.kind) << '(';
      print(os, n.args[0]);
      os << ')';
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> out;
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{e.id()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->kind == Kind::symbol) out.insert(n->name);
    for (const auto& a : n->args) stack.push_back(a.id());
  }
  return out;
}

// --------------------------------------------------------------- parsing

ParseError::ParseError(const std::string& msg, std::size_t offset)
    : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}

namespace {

const std::map<std::string, Kind, std::less<>>& builtin_functions() {
  static const std::map<std::string, Kind, std::less<>> table = {
      {"sin", Kind::sin},   {"cos", Kind::cos}, {"sinh", Kind::sinh}, {"cosh", Kind::cosh},
      {"exp", Kind::exp},   {"ln", Kind::ln},   {"log", Kind::ln},    {"sqrt", Kind::sqrt},
  };
  return table;
}

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable* strict) : s_(text), strict_(strict) {}

  Expr parse() {
    Expr e = expression();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        return e;
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (accept('*'))
        e = e * factor();
      else if (accept('/'))
        e = e / factor();
      else
        return e;
    }
  }

  Expr factor() {
    Expr b = base();
    if (accept('^')) {
      Rational q;
      if (accept('(')) {
        q = rational_literal();
        expect(')');
      } else {
        q = rational_literal();
      }
      b = pow(b, q);
    }
    return b;
  }

  Rational rational_literal() {
    skip_ws();
    bool negative = accept('-');
    skip_ws();
    Rational q = number();
    std::size_t save = pos_;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '/') {
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        Rational d = number();
        if (d == 0) fail("zero denominator in rational exponent");
        q /= d;
      } else {
        pos_ = save;
      }
    } else {
      pos_ = save;
    }
    return negative ? Rational(-q) : q;
  }

  Rational number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected number");
    BigInt mant(std::string(s_.substr(start, pos_ - start)));
    BigInt scale = 1;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      std::size_t fs = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      for (std::size_t i = fs; i < pos_; ++i) {
        mant = mant * 10 + (s_[i] - '0');
        scale *= 10;
      }
    }
    Rational value(mant, scale);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      bool neg = false;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) neg = s_[pos_++] == '-';
      std::size_t es = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == es) {
        pos_ = save;
      } else {
        int ex = std::stoi(std::string(s_.substr(es, pos_ - es)));
        Rational p10 = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(ex));
        value = neg ? Rational(value / p10) : Rational(value * p10);
      }
    }
    return value;
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Expr base() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '-') {
      ++pos_;
      return -base();
    }
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return Expr(number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t at = pos_;
      std::string id = identifier();
      int primes = 0;
      while (pos_ < s_.size() && s_[pos_] == '\'') {
        ++primes;
        ++pos_;
      }
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        ++pos_;
        std::vector<Expr> args{expression()};
        while (accept(',')) args.push_back(expression());
        expect(')');
        auto bi = builtin_functions().find(id);
        if (bi != builtin_functions().end() && primes == 0) {
          if (args.size() != 1) throw ParseError(id + " takes one argument", at);
          return apply(bi->second, args[0]);
        }
        if (strict_ != nullptr && strict_->functions.count(id) == 0)
          throw ParseError("unknown function '" + id + "'", at);
        std::vector<int> derivs(args.size(), 0);
        if (primes > 0) {
          if (args.size() != 1) throw ParseError("primes need a one-argument function", at);
          derivs[0] = primes;
        }
        return Expr::function(id, std::move(args), std::move(derivs));
      }
      if (primes > 0) throw ParseError("prime on a non-function", at);
      if (strict_ != nullptr && strict_->symbols.count(id) == 0)
        throw ParseError("unknown symbol '" + id + "'", at);
      return Expr::symbol(id);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view s_;
  const SymbolTable* strict_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const SymbolTable* strict) {
  return Parser(text, strict).parse();
}

// ------------------------------------------------------------- calculus

namespace {

class Differentiator {
 public:
  Differentiator(std::string coord, DiffMemo& memo) : x_(std::move(coord)), memo_(memo) {}

  Expr operator()(const Expr& e) {
    auto it = memo_.find(e.id());
    if (it != memo_.end()) return it->second.second;
    Expr d = compute(e);
    memo_.emplace(e.id(), std::make_pair(e, d));
    return d;
  }

 private:
  Expr compute(const Expr& e) {
    const Node& n = e.node();
    switch (n.kind) {
      case Kind::constant:
        return Expr(0);
      case Kind::symbol:
        return Expr(n.name == x_ ? 1 : 0);
      case Kind::neg:
        return -(*this)(n.args[0]);
      case Kind::add:
        return (*this)(n.args[0]) + (*this)(n.args[1]);
      case Kind::mul: {
        const Expr& a = n.args[0];
        const Expr& b = n.args[1];
        return (*this)(a) * b + a * (*this)(b);
      }
      case Kind::div: {
        const Expr& a = n.args[0];
        const Expr& b = n.args[1];
        Expr da = (*this)(a);
        Expr db = (*this)(b);
        if (db.is_zero()) return da / b;
        return (da * b - a * db) / pow(b, 2);
      }
      case Kind::pow: {
        const Expr& a = n.args[0];
        return Expr(n.value) * pow(a, n.value - 1) * (*this)(a);
      }
      case Kind::sin:
        return cos(n.args[0]) * (*this)(n.args[0]);
      case Kind::cos:
        return -(sin(n.args[0]) * (*this)(n.args[0]));
      case Kind::sinh:
        return cosh(n.args[0]) * (*this)(n.args[0]);
      case Kind::cosh:
        return sinh(n.args[0]) * (*this)(n.args[0]);
      case Kind::exp:
        return e * (*this)(n.args[0]);
      case Kind::ln:
        return (*this)(n.args[0]) / n.args[0];
      case Kind::sqrt:
        return (*this)(n.args[0]) / (Expr(2) * e);
      case Kind::function: {
        Expr out(0);
        for (std::size_t i = 0; i < n.args.size(); ++i) {
          Expr da = (*this)(n.args[i]);
          if (da.is_zero()) continue;
          std::vector<int> derivs = n.derivs;
          ++derivs[i];
          out = out + Expr::function(n.name, n.args, std::move(derivs)) * da;
        }
        return out;
      }
    }
    return Expr(0);
  }

  std::string x_;
  DiffMemo& memo_;
};

Expr rebuild(const Expr& e, std::vector<Expr> args) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::neg: return -args[0];
    case Kind::add: return args[0] + args[1];
    case Kind::mul: return args[0] * args[1];
    case Kind::div: return args[0] / args[1];
    case Kind::pow: return pow(args[0], n.value);
    case Kind::function: return Expr::function(n.name, std::move(args), n.derivs);
    default: return apply(n.kind, args[0]);
  }
}

template <class Leaf>
Expr transform(const Expr& e, Leaf&& leaf, std::unordered_map<const Node*, Expr>& memo) {
  auto it = memo.find(e.id());
  if (it != memo.end()) return it->second;
  Expr out;
  if (auto l = leaf(e)) {
    out = *l;
  } else if (e.args().empty()) {
    out = e;
  } else {
    std::vector<Expr> args;
    args.reserve(e.args().size());
    bool changed = false;
    for (const auto& a : e.args()) {
      args.push_back(transform(a, leaf, memo));
      changed |= args.back().id() != a.id();
    }
    out = changed ? rebuild(e, std::move(args)) : e;
  }
  memo.emplace(e.id(), out);
  return out;
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& coord) {
  DiffMemo memo;
  return Differentiator(coord, memo)(e);
}

Expr differentiate(const Expr& e, const std::string& coord, DiffMemo& memo) {
  return Differentiator(coord, memo)(e);
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl) {
  std::unordered_map<const Node*, Expr> memo;
  return transform(
      e,
      [&](const Expr& x) -> std::optional<Expr> {
        if (x.kind() == Kind::symbol) {
          auto it = repl.find(x.name());
          if (it != repl.end()) return it->second;
        }
        return std::nullopt;
      },
      memo);
}

Expr bind_functions(const Expr& e, const FunctionTable& table) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<std::optional<Expr>(const Expr&)> leaf;
  leaf = [&](const Expr& x) -> std::optional<Expr> {
    if (x.kind() != Kind::function) return std::nullopt;
    auto it = table.find(x.name());
    if (it == table.end()) return std::nullopt;
    const FunctionDef& def = it->second;
    if (def.params.size() != x.args().size())
      throw std::invalid_argument("arity mismatch binding '" + x.name() + "'");
    Expr body = def.body;
    for (std::size_t i = 0; i < x.derivs().size(); ++i)
      for (int k = 0; k < x.derivs()[i]; ++k) body = differentiate(body, def.params[i]);
    std::map<std::string, Expr> repl;
    for (std::size_t i = 0; i < def.params.size(); ++i)
      repl[def.params[i]] = transform(x.args()[i], leaf, memo);
    return bind_functions(substitute(body, repl), table);
  };
  return transform(e, leaf, memo);
}

// ------------------------------------------------------------ evaluation

EvalError::EvalError(Reason reason, const std::string& what, std::string subtree)
    : std::runtime_error(what + " in '" + subtree + "'"), reason_(reason), subtree_(std::move(subtree)) {}

double Number::to_double() const {
  if (exact()) return curv3d::to_double(rational());
  return std::get<double>(v_);
}

std::string Number::to_string() const {
  if (exact()) return curv3d::to_string(rational());
  std::ostringstream os;
  os.precision(17);
  os << std::get<double>(v_);
  return os.str();
}

const Number& Point::at(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end())
    throw EvalError(EvalError::Reason::unbound_symbol, "unbound symbol '" + name + "'", name);
  return it->second;
}

bool Point::all_exact() const {
  for (const auto& [k, v] : values_)
    if (!v.exact()) return false;
  return true;
}

Point Point::parse(std::string_view text) {
  Point p;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(pos, comma - pos);
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected name=value", pos);
    std::string name(item.substr(0, eq));
    name.erase(0, name.find_first_not_of(' '));
    name.erase(name.find_last_not_of(' ') + 1);
    Expr v = parse_expr(item.substr(eq + 1));
    if (v.is_constant())
      p.set(name, Number(v.constant_value()));
    else
      p.set(name, Number(evaluate_float(v, Point{})));
    pos = comma + 1;
  }
  return p;
}

double EvalTraits<double>::div(double a, double b, const Expr& where) {
  if (b == 0.0) throw EvalError(EvalError::Reason::division_by_zero, "division by zero", to_string(where));
  return a / b;
}

double EvalTraits<double>::pow(double a, const Rational& q, const Expr& where) {
  if (is_integer(q)) {
    long n = numerator(q).convert_to<long>();
    if (a == 0.0 && n < 0)
      throw EvalError(EvalError::Reason::division_by_zero, "zero to a negative power", to_string(where));
    double r = 1.0, b = n < 0 ? 1.0 / a : a;
    for (long k = std::labs(n); k > 0; k >>= 1, b *= b)
      if (k & 1) r *= b;
    return r;
  }
  if (a < 0.0) throw EvalError(EvalError::Reason::domain, "fractional power of a negative number", to_string(where));
  if (a == 0.0 && q < 0)
    throw EvalError(EvalError::Reason::division_by_zero, "zero to a negative power", to_string(where));
  return std::pow(a, curv3d::to_double(q));
}

double EvalTraits<double>::apply(Kind k, double a, const Expr& where) {
  double r = 0.0;
  switch (k) {
    case Kind::sin: r = std::sin(a); break;
    case Kind::cos: r = std::cos(a); break;
    case Kind::sinh: r = std::sinh(a); break;
    case Kind::cosh: r = std::cosh(a); break;
    case Kind::exp: r = std::exp(a); break;
    case Kind::ln:
      if (a <= 0.0) throw EvalError(EvalError::Reason::domain, "logarithm of a non-positive number", to_string(where));
      r = std::log(a);
      break;
    case Kind::sqrt:
      if (a < 0.0) throw EvalError(EvalError::Reason::domain, "square root of a negative number", to_string(where));
      r = std::sqrt(a);
      break;
    default:
      throw std::logic_error("not an elementary function");
  }
  if (!std::isfinite(r)) throw EvalError(EvalError::Reason::domain, "non-finite result", to_string(where));
  return r;
}

Rational EvalTraits<Rational>::div(const Rational& a, const Rational& b, const Expr& where) {
  if (b == 0) throw EvalError(EvalError::Reason::division_by_zero, "division by zero", to_string(where));
  return a / b;
}

Rational EvalTraits<Rational>::pow(const Rational& a, const Rational& q, const Expr& where) {
  if (a == 0 && q < 0)
    throw EvalError(EvalError::Reason::division_by_zero, "zero to a negative power", to_string(where));
  if (auto r = rational_power(a, q)) return *r;
  throw EvalError(EvalError::Reason::not_exact, "power has no exact rational value", to_string(where));
}

Rational EvalTraits<Rational>::apply(Kind k, const Rational& a, const Expr& where) {
  if (a == 0) {
    if (k == Kind::sin || k == Kind::sinh || k == Kind::sqrt) return 0;
    if (k == Kind::cos || k == Kind::cosh || k == Kind::exp) return 1;
  }
  if (k == Kind::ln) {
    if (a <= 0) throw EvalError(EvalError::Reason::domain, "logarithm of a non-positive number", to_string(where));
    if (a == 1) return 0;
  }
  if (k == Kind::sqrt) {
    if (a < 0) throw EvalError(EvalError::Reason::domain, "square root of a negative number", to_string(where));
    if (auto r = rational_power(a, Rational(1, 2))) return *r;
  }
  throw EvalError(EvalError::Reason::not_exact, "transcendental value is not rational", to_string(where));
}

Number evaluate(const Expr& e, const Point& p, Mode mode, const FunctionTable* functions) {
  if (mode == Mode::exact) return Number(evaluate_exact(e, p, functions));
  return Number(evaluate_float(e, p, functions));
}

double evaluate_float(const Expr& e, const Point& p, const FunctionTable* functions) {
  return evaluate_as<double>(e, [&p](const std::string& s) { return p.at(s).to_double(); }, functions);
}

Rational evaluate_exact(const Expr& e, const Point& p, const FunctionTable* functions) {
  return evaluate_as<Rational>(
      e,
      [&p](const std::string& s) -> Rational {
        const Number& v = p.at(s);
        if (!v.exact())
          throw EvalError(EvalError::Reason::not_exact, "coordinate '" + s + "' is not exact", s);
        return v.rational();
      },
      functions);
}

std::vector<double> evaluate_many(const std::vector<Expr>& es, const Point& p,
                                  const FunctionTable* functions) {
  Evaluator<double> ev([&p](const std::string& s) { return p.at(s).to_double(); }, functions);
  std::vector<double> out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(ev(e));
  return out;
}

}  // namespace expr
}  // namespace curv3d
