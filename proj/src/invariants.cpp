#include "curv3d/invariants.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace curv3d {

// ------------------------------------------------------ ContractionScheme

int ContractionScheme::offset(int factor) const {
  int off = 0;
  for (int i = 0; i < factor; ++i) off += 2 + orders[static_cast<std::size_t>(i)];
  return off;
}

int ContractionScheme::factor_of(int slot) const {
  int off = 0;
  for (int i = 0; i < num_factors(); ++i) {
    off += 2 + orders[static_cast<std::size_t>(i)];
    if (slot < off) return i;
  }
  throw std::out_of_range("slot out of range");
}

int ContractionScheme::order() const {
  int o = 0;
  for (int d : orders) o += 2 + d;
  return o;
}

bool ContractionScheme::valid() const {
  if (static_cast<int>(partner.size()) != order()) return false;
  for (int s = 0; s < num_slots(); ++s) {
    int p = partner[static_cast<std::size_t>(s)];
    if (p < 0 || p >= num_slots() || p == s || partner[static_cast<std::size_t>(p)] != s) return false;
  }
  return std::is_sorted(orders.begin(), orders.end());
}

bool ContractionScheme::connected() const {
  int k = num_factors();
  if (k <= 1) return true;
  std::vector<int> parent(static_cast<std::size_t>(k));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]);
  };
  for (int s = 0; s < num_slots(); ++s)
    parent[static_cast<std::size_t>(find(factor_of(s)))] = find(factor_of(partner[static_cast<std::size_t>(s)]));
  int root = find(0);
  for (int i = 1; i < k; ++i)
    if (find(i) != root) return false;
  return true;
}

std::string ContractionScheme::to_string() const {
  if (orders.empty()) return "1";
  std::vector<char> label(partner.size(), 0);
  std::vector<bool> up(partner.size(), false);
  char next = 'a';
  for (int s = 0; s < num_slots(); ++s) {
    if (label[static_cast<std::size_t>(s)] != 0) continue;
    int p = partner[static_cast<std::size_t>(s)];
    label[static_cast<std::size_t>(s)] = label[static_cast<std::size_t>(p)] = next;
    next = next == 'z' ? 'A' : static_cast<char>(next + 1);
    bool su = (s < static_cast<int>(upper.size())) ? upper[static_cast<std::size_t>(s)] : false;
    up[static_cast<std::size_t>(s)] = su;
    up[static_cast<std::size_t>(p)] = !su;
  }
  std::string out;
  for (int f = 0; f < num_factors(); ++f) {
    if (f) out += ' ';
    int off = offset(f);
    int d = orders[static_cast<std::size_t>(f)];
    bool scalar = partner[static_cast<std::size_t>(off)] == off + 1;
    out += 'R';
    struct Idx {
      char l;
      bool up, deriv;
    };
    std::vector<Idx> idx;
    if (!scalar)
      for (int j = 0; j < 2; ++j) idx.push_back({label[static_cast<std::size_t>(off + j)], up[static_cast<std::size_t>(off + j)], false});
    for (int j = 0; j < d; ++j)
      idx.push_back({label[static_cast<std::size_t>(off + 2 + j)], up[static_cast<std::size_t>(off + 2 + j)], true});
    std::size_t i = 0;
    while (i < idx.size()) {
      bool u = idx[i].up;
      out += u ? "^{" : "_{";
      bool in_deriv = false;
      while (i < idx.size() && idx[i].up == u) {
        if (idx[i].deriv && !in_deriv) {
          out += ';';
          in_deriv = true;
        }
        out += idx[i].l;
        ++i;
      }
      out += '}';
    }
  }
  return out;
}

namespace {

struct Group {
  std::vector<std::vector<int>> factor_perms;  // new position of each factor
  std::vector<int> blocks;                     // factor count per order block
};

void permute_blocks(const std::vector<std::pair<int, int>>& blocks, std::size_t bi, std::vector<int>& cur,
                    std::vector<std::vector<int>>& out) {
  if (bi == blocks.size()) {
    out.push_back(cur);
    return;
  }
  auto [start, len] = blocks[bi];
  std::vector<int> p(static_cast<std::size_t>(len));
  std::iota(p.begin(), p.end(), start);
  do {
    for (int i = 0; i < len; ++i) cur[static_cast<std::size_t>(start + i)] = p[static_cast<std::size_t>(i)];
    permute_blocks(blocks, bi + 1, cur, out);
  } while (std::next_permutation(p.begin(), p.end()));
}

// Slot maps for every group element of a case.
const std::vector<std::vector<int>>& slot_maps(const std::vector<int>& orders) {
  static std::map<std::vector<int>, std::vector<std::vector<int>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(orders);
  if (it != cache.end()) return it->second;
  int k = static_cast<int>(orders.size());
  std::vector<std::pair<int, int>> blocks;
  for (int i = 0; i < k;) {
    int j = i;
    while (j < k && orders[static_cast<std::size_t>(j)] == orders[static_cast<std::size_t>(i)]) ++j;
    blocks.emplace_back(i, j - i);
    i = j;
  }
  std::vector<std::vector<int>> perms;
  std::vector<int> cur(static_cast<std::size_t>(k));
  permute_blocks(blocks, 0, cur, perms);
  std::vector<int> off(static_cast<std::size_t>(k) + 1, 0);
  for (int i = 0; i < k; ++i) off[static_cast<std::size_t>(i) + 1] = off[static_cast<std::size_t>(i)] + 2 + orders[static_cast<std::size_t>(i)];
  std::vector<std::vector<int>> maps;
  for (const auto& perm : perms) {
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      std::vector<int> sigma(static_cast<std::size_t>(off.back()));
      for (int f = 0; f < k; ++f) {
        int to = perm[static_cast<std::size_t>(f)];
        int len = 2 + orders[static_cast<std::size_t>(f)];
        for (int j = 0; j < len; ++j) {
          int jj = j;
          if (j < 2 && (mask >> f) & 1u) jj = 1 - j;
          sigma[static_cast<std::size_t>(off[static_cast<std::size_t>(f)] + j)] = off[static_cast<std::size_t>(to)] + jj;
        }
      }
      maps.push_back(std::move(sigma));
    }
  }
  return cache.emplace(orders, std::move(maps)).first->second;
}

}  // namespace

ContractionScheme canonical(const ContractionScheme& s) {
  ContractionScheme best = s;
  best.upper.clear();
  if (s.orders.empty()) return best;
  std::vector<int> cand(s.partner.size());
  for (const auto& sigma : slot_maps(s.orders)) {
    for (std::size_t x = 0; x < s.partner.size(); ++x)
      cand[static_cast<std::size_t>(sigma[x])] = sigma[static_cast<std::size_t>(s.partner[x])];
    if (cand < best.partner) best.partner = cand;
  }
  // Display: first slot of each pair lowered.
  best.upper.assign(best.partner.size(), false);
  for (std::size_t x = 0; x < best.partner.size(); ++x)
    if (static_cast<std::size_t>(best.partner[x]) < x) best.upper[x] = true;
  return best;
}

namespace {

void matchings(std::vector<int>& partner, std::vector<ContractionScheme>& sink, const std::vector<int>& orders,
               std::set<std::vector<int>>& seen) {
  auto first = std::find(partner.begin(), partner.end(), -1);
  if (first == partner.end()) {
    ContractionScheme s{orders, partner, {}};
    ContractionScheme c = canonical(s);
    if (seen.insert(c.partner).second) sink.push_back(std::move(c));
    return;
  }
  int i = static_cast<int>(first - partner.begin());
  for (int j = i + 1; j < static_cast<int>(partner.size()); ++j) {
    if (partner[static_cast<std::size_t>(j)] != -1) continue;
    partner[static_cast<std::size_t>(i)] = j;
    partner[static_cast<std::size_t>(j)] = i;
    matchings(partner, sink, orders, seen);
    partner[static_cast<std::size_t>(i)] = partner[static_cast<std::size_t>(j)] = -1;
  }
}

}  // namespace

std::vector<ContractionScheme> enumerate_schemes(std::vector<int> case_orders) {
  std::sort(case_orders.begin(), case_orders.end());
  int n = 0;
  for (int d : case_orders) {
    if (d < 0) throw std::invalid_argument("negative derivative order");
    n += 2 + d;
  }
  if (n % 2) throw std::invalid_argument("odd total slot count");
  std::vector<ContractionScheme> out;
  std::set<std::vector<int>> seen;
  std::vector<int> partner(static_cast<std::size_t>(n), -1);
  if (n == 0) return out;
  matchings(partner, out, case_orders, seen);
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t count_matchings(const std::vector<int>& case_orders) {
  int n = 0;
  for (int d : case_orders) n += 2 + d;
  if (n % 2) return 0;
  std::uint64_t c = 1;
  for (int k = n - 1; k > 0; k -= 2) c *= static_cast<std::uint64_t>(k);
  return c;
}

// -------------------------------------------------------------- Invariant

int Invariant::max_derivative() const {
  int m = 0;
  for (const auto& t : terms)
    for (int d : t.scheme.orders) m = std::max(m, d);
  return m;
}

std::vector<int> Invariant::case_orders() const { return terms.empty() ? std::vector<int>{} : terms.front().scheme.orders; }

Invariant Invariant::from_scheme(const ContractionScheme& s) {
  Invariant inv;
  inv.text = s.to_string();
  inv.terms.push_back({Rational(1), s});
  return inv;
}

namespace {

struct RawIndex {
  int label;
  bool deriv;
  std::size_t pos;
};

struct RawFactor {
  char head = 0;
  std::size_t pos = 0;
  std::vector<RawIndex> idx;
  bool in_deriv = false;
};

class InvariantParser {
 public:
  explicit InvariantParser(std::string_view s) : s_(s) {}

  std::vector<RawFactor> parse() {
    std::vector<RawFactor> out;
    for (;;) {
      skip();
      if (pos_ >= s_.size()) break;
      if (s_[pos_] == '*') {
        ++pos_;
        continue;
      }
      out.push_back(factor());
    }
    if (out.empty()) fail("empty invariant");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& m) const { throw InvariantParseError(m, pos_); }

  void skip() {
    for (;;) {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ + 1 < s_.size() && s_[pos_] == '{' && s_[pos_ + 1] == '}') {
        pos_ += 2;
        continue;
      }
      break;
    }
  }

  RawFactor factor() {
    skip();
    if (pos_ >= s_.size()) fail("expected a tensor");
    RawFactor f;
    if (s_[pos_] == '{') {
      ++pos_;
      f = factor();
      skip();
      if (pos_ >= s_.size() || s_[pos_] != '}') fail("expected '}'");
      ++pos_;
    } else if (std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
      f.pos = pos_;
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string head(s_.substr(start, pos_ - start));
      if (head != "R" && head != "S" && head != "g") {
        pos_ = start;
        fail("unknown tensor head '" + head + "'");
      }
      f.head = head[0];
    } else {
      fail(std::string("unexpected character '") + s_[pos_] + "'");
    }
    groups(f);
    return f;
  }

  void groups(RawFactor& f) {
    for (;;) {
      skip();
      if (pos_ >= s_.size() || (s_[pos_] != '^' && s_[pos_] != '_')) return;
      ++pos_;
      skip_spaces();
      if (pos_ >= s_.size()) fail("expected an index");
      if (s_[pos_] == '{') {
        ++pos_;
        for (;;) {
          skip_spaces();
          if (pos_ >= s_.size()) fail("unterminated index group");
          char c = s_[pos_];
          if (c == '}') {
            ++pos_;
            break;
          }
          if (c == ';' || c == ',') {
            f.in_deriv = true;
          } else if (c == '~') {
          } else if (std::isalpha(static_cast<unsigned char>(c))) {
            f.idx.push_back({static_cast<unsigned char>(c), f.in_deriv, pos_});
          } else {
            fail(std::string("invalid index character '") + c + "'");
          }
          ++pos_;
        }
      } else {
        char c = s_[pos_];
        if (c == ';' || c == ',') {
          f.in_deriv = true;
          ++pos_;
          if (pos_ >= s_.size() || !std::isalpha(static_cast<unsigned char>(s_[pos_]))) fail("expected an index");
          c = s_[pos_];
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) fail("expected an index");
        f.idx.push_back({static_cast<unsigned char>(c), f.in_deriv, pos_});
        ++pos_;
      }
    }
  }

  void skip_spaces() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

// An atom is a Ricci factor (labels: 2 Ricci + derivatives) or a metric factor (2 labels).
struct Atom {
  bool metric;
  std::vector<int> labels;
};

struct RawTerm {
  Rational coeff;
  std::vector<Atom> atoms;
};

std::vector<RawTerm> expand(const RawFactor& f, int& fresh) {
  std::vector<int> plain, derivs;
  for (const auto& i : f.idx) (i.deriv ? derivs : plain).push_back(i.label);
  auto ricci = [&](int a, int b) {
    std::vector<int> l{a, b};
    l.insert(l.end(), derivs.begin(), derivs.end());
    return Atom{false, l};
  };
  auto scalar = [&]() {
    int a = fresh++;
    return ricci(a, a);
  };
  auto metric = [](int a, int b) { return Atom{true, {a, b}}; };
  auto fail = [&](const std::string& m) -> std::vector<RawTerm> { throw InvariantParseError(m, f.pos); };
  switch (f.head) {
    case 'g':
      if (plain.size() != 2) return fail("metric needs two indices");
      if (!derivs.empty()) return {};  // covariantly constant
      return {{Rational(1), {metric(plain[0], plain[1])}}};
    case 'S':
      if (plain.size() != 2) return fail("trace-free Ricci needs two indices");
      return {{Rational(1), {ricci(plain[0], plain[1])}},
              {Rational(-1, 3), {metric(plain[0], plain[1]), scalar()}}};
    case 'R': {
      if (plain.empty()) return {{Rational(1), {scalar()}}};
      if (plain.size() == 2) return {{Rational(1), {ricci(plain[0], plain[1])}}};
      if (plain.size() == 4) {
        int a = plain[0], b = plain[1], c = plain[2], d = plain[3];
        return {{Rational(1), {metric(a, c), ricci(b, d)}},
                {Rational(1), {metric(b, d), ricci(a, c)}},
                {Rational(-1), {metric(a, d), ricci(b, c)}},
                {Rational(-1), {metric(b, c), ricci(a, d)}},
                {Rational(-1, 2), {metric(a, c), metric(b, d), scalar()}},
                {Rational(1, 2), {metric(a, d), metric(b, c), scalar()}}};
      }
      return fail("R takes 0, 2 or 4 non-derivative indices");
    }
  }
  return fail("unknown tensor head");
}

std::vector<Term> resolve(const std::vector<RawTerm>& raw) {
  std::map<ContractionScheme, Rational> acc;
  std::vector<ContractionScheme> order;
  for (RawTerm t : raw) {
    // Remove metric factors by relabeling.
    for (;;) {
      auto it = std::find_if(t.atoms.begin(), t.atoms.end(), [](const Atom& a) { return a.metric; });
      if (it == t.atoms.end()) break;
      int x = it->labels[0], y = it->labels[1];
      std::size_t self = static_cast<std::size_t>(it - t.atoms.begin());
      t.atoms.erase(t.atoms.begin() + static_cast<long>(self));
      if (x == y) {
        t.coeff *= 3;
        continue;
      }
      bool done = false;
      for (auto& a : t.atoms)
        for (auto& l : a.labels)
          if (!done && l == y) {
            l = x;
            done = true;
          }
      if (!done) throw InvariantParseError("dangling metric index", 0);
    }
    std::stable_sort(t.atoms.begin(), t.atoms.end(),
                     [](const Atom& a, const Atom& b) { return a.labels.size() < b.labels.size(); });
    ContractionScheme s;
    std::vector<int> labels;
    for (const auto& a : t.atoms) {
      s.orders.push_back(static_cast<int>(a.labels.size()) - 2);
      labels.insert(labels.end(), a.labels.begin(), a.labels.end());
    }
    s.partner.assign(labels.size(), -1);
    std::map<int, int> first;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto f = first.find(labels[i]);
      if (f == first.end()) {
        first[labels[i]] = static_cast<int>(i);
      } else {
        s.partner[i] = f->second;
        s.partner[static_cast<std::size_t>(f->second)] = static_cast<int>(i);
      }
    }
    ContractionScheme c = canonical(s);
    if (!acc.count(c)) order.push_back(c);
    acc[c] += t.coeff;
  }
  std::vector<Term> out;
  for (const auto& c : order)
    if (acc[c] != 0) out.push_back({acc[c], c});
  return out;
}

}  // namespace

Invariant parse_invariant(std::string_view text) {
  auto factors = InvariantParser(text).parse();
  std::map<int, int> count;
  std::map<int, std::size_t> where;
  for (const auto& f : factors)
    for (const auto& i : f.idx) {
      ++count[i.label];
      where[i.label] = i.pos;
    }
  std::string free;
  for (const auto& [l, c] : count) {
    if (c > 2) throw InvariantParseError(std::string("index '") + static_cast<char>(l) + "' appears " + std::to_string(c) + " times", where[l]);
    if (c == 1) free += static_cast<char>(l);
  }
  if (!free.empty()) throw InvariantParseError("free indices remain: " + free, where[static_cast<unsigned char>(free[0])]);

  int fresh = 1000;
  std::vector<RawTerm> terms{{Rational(1), {}}};
  for (const auto& f : factors) {
    auto ex = expand(f, fresh);
    std::vector<RawTerm> next;
    for (const auto& t : terms)
      for (const auto& e : ex) {
        RawTerm r{t.coeff * e.coeff, t.atoms};
        r.atoms.insert(r.atoms.end(), e.atoms.begin(), e.atoms.end());
        next.push_back(std::move(r));
      }
    terms = std::move(next);
  }
  Invariant inv;
  inv.text = std::string(text);
  inv.terms = resolve(terms);
  return inv;
}

// ------------------------------------------------------------- evaluation

template <class S>
S evaluate_scheme(const ContractionScheme& s, const FrameCurvature<S>& fc) {
  const S& like = fc.nabla.at(0)[0];
  if (s.orders.empty()) return ScalarOps<S>::constant(like, 1);
  int n = fc.nabla[0].dim();
  int k = s.num_factors();
  int slots = s.num_slots();
  for (int d : s.orders)
    if (d >= static_cast<int>(fc.nabla.size())) throw std::invalid_argument("curvature derivative order too low");
  std::vector<int> pair_of(static_cast<std::size_t>(slots), -1);
  int npairs = 0;
  for (int x = 0; x < slots; ++x)
    if (pair_of[static_cast<std::size_t>(x)] < 0) {
      pair_of[static_cast<std::size_t>(x)] = pair_of[static_cast<std::size_t>(s.partner[static_cast<std::size_t>(x)])] = npairs++;
    }
  // stride[f][p]: contribution of pair p's value to factor f's flat offset.
  std::vector<std::vector<std::size_t>> stride(static_cast<std::size_t>(k), std::vector<std::size_t>(static_cast<std::size_t>(npairs), 0));
  for (int f = 0; f < k; ++f) {
    int off = s.offset(f);
    int len = 2 + s.orders[static_cast<std::size_t>(f)];
    std::size_t st = 1;
    for (int j = len - 1; j >= 0; --j) {
      stride[static_cast<std::size_t>(f)][static_cast<std::size_t>(pair_of[static_cast<std::size_t>(off + j)])] += st;
      st *= static_cast<std::size_t>(n);
    }
  }
  std::vector<const S*> data;
  for (int f = 0; f < k; ++f) data.push_back(fc.nabla[static_cast<std::size_t>(s.orders[static_cast<std::size_t>(f)])].data().data());
  std::vector<int> v(static_cast<std::size_t>(npairs), 0);
  std::vector<std::size_t> off(static_cast<std::size_t>(k), 0);
  S acc = ScalarOps<S>::constant(like, 0);
  for (;;) {
    double sign = 1.0;
    for (int p = 0; p < npairs; ++p) sign *= fc.eta[static_cast<std::size_t>(v[static_cast<std::size_t>(p)])];
    S prod = data[0][off[0]];
    for (int f = 1; f < k; ++f) prod = prod * data[static_cast<std::size_t>(f)][off[static_cast<std::size_t>(f)]];
    if (sign < 0)
      acc = acc - prod;
    else
      acc = acc + prod;
    int p = 0;
    for (; p < npairs; ++p) {
      auto& vp = v[static_cast<std::size_t>(p)];
      if (vp + 1 < n) {
        ++vp;
        for (int f = 0; f < k; ++f) off[static_cast<std::size_t>(f)] += stride[static_cast<std::size_t>(f)][static_cast<std::size_t>(p)];
        break;
      }
      for (int f = 0; f < k; ++f)
        off[static_cast<std::size_t>(f)] -= stride[static_cast<std::size_t>(f)][static_cast<std::size_t>(p)] * static_cast<std::size_t>(vp);
      vp = 0;
    }
    if (p == npairs) break;
  }
  return acc;
}

template <class S>
S evaluate(const Invariant& inv, const FrameCurvature<S>& fc) {
  S acc = ScalarOps<S>::constant(fc.nabla.at(0)[0], 0);
  for (const auto& t : inv.terms) acc = acc + evaluate_scheme(t.scheme, fc) * ScalarOps<S>::constant(fc.nabla[0][0], t.coeff);
  return acc;
}

template double evaluate_scheme(const ContractionScheme&, const FrameCurvature<double>&);
template Jet evaluate_scheme(const ContractionScheme&, const FrameCurvature<Jet>&);
template double evaluate(const Invariant&, const FrameCurvature<double>&);
template Jet evaluate(const Invariant&, const FrameCurvature<Jet>&);

double evaluate_invariant(const Invariant& inv, const MetricSpec& g, const expr::Point& p, const EvalOptions& opt) {
  int d = inv.max_derivative();
  if (d > opt.derivative_cap)
    throw std::invalid_argument("derivative order " + std::to_string(d) + " exceeds the cap " + std::to_string(opt.derivative_cap));
  g.check_at(p);
  return evaluate(inv, frame_values(g, p, d));
}

double evaluate_invariant(const ContractionScheme& s, const MetricSpec& g, const expr::Point& p, const EvalOptions& opt) {
  return evaluate_invariant(Invariant::from_scheme(s), g, p, opt);
}

// --------------------------------------------------------------- counting

namespace {

void cases_with(int degree, int total_d, int min_d, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == degree) {
    if (total_d == 0) out.push_back(cur);
    return;
  }
  int left = degree - static_cast<int>(cur.size());
  for (int d = min_d; d * left <= total_d; ++d) {
    cur.push_back(d);
    cases_with(degree, total_d - d, d, cur, out);
    cur.pop_back();
  }
}

struct RowSource {
  std::vector<std::function<double(const FrameCurvature<double>&)>> rows;
};

/// Greedy incremental orthogonalization of normalized rows in order.
struct GreedyBasis {
  explicit GreedyBasis(double tol) : tol(tol) {}
  double tol;
  std::vector<Eigen::VectorXd> q;
  double weakest_kept = std::numeric_limits<double>::infinity();
  double strongest_dropped = 0;

  bool add(Eigen::VectorXd v) {
    double norm = v.norm();
    if (!(norm > 0) || !std::isfinite(norm)) {
      return false;
    }
    v /= norm;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : q) v -= b.dot(v) * b;
    double r = v.norm();
    if (r > tol) {
      q.push_back(v / r);
      weakest_kept = std::min(weakest_kept, r);
      return true;
    }
    strongest_dropped = std::max(strongest_dropped, r);
    return false;
  }
};

int thread_count(const RankOptions& opt) { return std::max(1, opt.threads); }

std::vector<FrameCurvature<double>> draw_samples(std::uint64_t seed, int count, int max_d, int threads) {
  JetSampler sampler(seed, 2 + max_d);
  std::vector<JetSample> js;
  for (int i = 0; i < count; ++i) js.push_back(sampler.next());
  std::vector<FrameCurvature<double>> out(static_cast<std::size_t>(count));
  auto work = [&](int t) {
    for (int i = t; i < count; i += threads) out[static_cast<std::size_t>(i)] = sample_curvature(js[static_cast<std::size_t>(i)], max_d);
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  return out;
}

using RowFn = std::function<double(const FrameCurvature<double>&)>;

CountResult run_count(const std::vector<int>& c, const std::vector<RowFn>& lower, const std::vector<ContractionScheme>& schemes,
                      std::uint64_t seed, const RankOptions& opt) {
  int max_d = 0;
  for (int d : c) max_d = std::max(max_d, d);
  int samples = std::max(opt.min_samples, 8);
  for (;;) {
    auto fcs = draw_samples(seed, samples, max_d, thread_count(opt));
    auto row = [&](const RowFn& f) {
      Eigen::VectorXd v(samples);
      for (int j = 0; j < samples; ++j) v(j) = f(fcs[static_cast<std::size_t>(j)]);
      return v;
    };
    GreedyBasis basis(opt.rel_tol);
    CountResult r;
    r.case_orders = c;
    r.seed = seed;
    r.samples = samples;
    r.num_schemes = schemes.size();
    r.num_lower = lower.size();
    for (const auto& f : lower) basis.add(row(f));
    r.lower_rank = static_cast<int>(basis.q.size());
    for (const auto& s : schemes)
      if (basis.add(row([&s](const FrameCurvature<double>& fc) { return evaluate_scheme(s, fc); }))) r.representatives.push_back(s);
    r.count = static_cast<int>(r.representatives.size());
    r.weakest_kept = std::isfinite(basis.weakest_kept) ? basis.weakest_kept : 0.0;
    r.strongest_dropped = basis.strongest_dropped;
    if (static_cast<int>(basis.q.size()) + 16 <= samples) return r;
    samples *= 2;
  }
}

std::vector<RowFn> commutator_rows(const std::vector<int>& c) {
  std::vector<RowFn> rows;
  for (const auto& hc : commutator_cases(c))
    for (const auto& s : enumerate_schemes(hc)) rows.push_back([s](const FrameCurvature<double>& fc) { return evaluate_scheme(s, fc); });
  return rows;
}

}  // namespace

std::vector<std::vector<int>> commutator_cases(const std::vector<int>& case_orders) {
  std::vector<std::vector<int>> out;
  int maxd = 0, order = 0;
  for (int d : case_orders) {
    maxd = std::max(maxd, d);
    order += 2 + d;
  }
  if (maxd < 2) return out;
  for (int k = static_cast<int>(case_orders.size()) + 1; 2 * k <= order; ++k) {
    std::vector<int> cur;
    std::vector<std::vector<int>> found;
    cases_with(k, order - 2 * k, 0, cur, found);
    for (auto& f : found)
      if (f.back() <= maxd) out.push_back(std::move(f));
  }
  return out;
}

CountResult count_case(const std::vector<int>& case_orders, std::uint64_t seed, const RankOptions& opt) {
  std::vector<int> c = case_orders;
  std::sort(c.begin(), c.end());
  auto schemes = enumerate_schemes(c);
  std::vector<RowFn> lower;
  for (const auto& s : schemes)
    if (!s.connected()) lower.push_back([s](const FrameCurvature<double>& fc) { return evaluate_scheme(s, fc); });
  auto comm = commutator_rows(c);
  lower.insert(lower.end(), comm.begin(), comm.end());
  return run_count(c, lower, schemes, seed, opt);
}

CountResult dedup_and_count(const std::vector<int>& case_orders, const std::vector<Invariant>& lower_basis,
                            std::uint64_t seed, const RankOptions& opt) {
  std::vector<int> c = case_orders;
  std::sort(c.begin(), c.end());
  auto schemes = enumerate_schemes(c);
  std::vector<RowFn> lower;
  // Products of basis elements whose cases combine to c.
  std::vector<std::vector<int>> bcases;
  for (const auto& b : lower_basis) {
    auto bc = b.case_orders();
    std::sort(bc.begin(), bc.end());
    bcases.push_back(bc);
  }
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t, std::multiset<int>&)> rec = [&](std::size_t from, std::multiset<int>& rest) {
    if (rest.empty()) {
      if (!chosen.empty()) {
        std::vector<std::size_t> pick = chosen;
        lower.push_back([pick, &lower_basis](const FrameCurvature<double>& fc) {
          double v = 1.0;
          for (auto i : pick) v *= evaluate(lower_basis[i], fc);
          return v;
        });
      }
      return;
    }
    for (std::size_t i = from; i < lower_basis.size(); ++i) {
      const auto& bc = bcases[i];
      if (bc.empty()) continue;
      std::multiset<int> next = rest;
      bool ok = true;
      for (int d : bc) {
        auto it = next.find(d);
        if (it == next.end()) {
          ok = false;
          break;
        }
        next.erase(it);
      }
      if (!ok) continue;
      chosen.push_back(i);
      rec(i, next);
      chosen.pop_back();
    }
  };
  std::multiset<int> all(c.begin(), c.end());
  rec(0, all);
  auto comm = commutator_rows(c);
  lower.insert(lower.end(), comm.begin(), comm.end());
  return run_count(c, lower, schemes, seed, opt);
}

nlohmann::json CountResult::to_json() const {
  nlohmann::json j;
  j["case"] = case_orders;
  j["count"] = count;
  j["num_schemes"] = num_schemes;
  j["lower_rows"] = num_lower;
  j["lower_rank"] = lower_rank;
  j["samples"] = samples;
  j["seed"] = seed;
  j["weakest_kept_residual"] = weakest_kept;
  j["strongest_dropped_residual"] = strongest_dropped;
  std::vector<std::string> reps;
  for (const auto& s : representatives) reps.push_back(s.to_string());
  j["representatives"] = reps;
  return j;
}

// --------------------------------------------------------------- builtins

std::vector<std::string> builtin_texts(BuiltinBasis kind) {
  switch (kind) {
    case BuiltinBasis::zeroth:
      return {"R", "R^{ab}R_{ab}", "R^{ab}R_a^{~c}R_{bc}"};
    case BuiltinBasis::first29:
      return {
          "R^{;a}R_{;a}",
          "R^{bc;d}R_{bc;d}",
          "R^{bc;d}R_{bd;c}",
          "R^{;c}{R_c}^{e;f}R_{;e}R_{;f}",
          "R^{;c}{R_c}^{e;f}{R_{ef}}^{;h}R_{;h}",
          "R^{;c}{R_c}^{e;f}{{R_e}^{h}}_{;f}R_{;h}",
          "R^{;c}{R_c}^{e;f}{{R_f}^h}_{;e}R_{;h}",
          "R^{;c}R^{;f}{R^{hi}}_{;c}R_{hi;f}",
          "R^{;c}{R_c}^{e;f}{R_e}^{h;i}R_{fh;i}",
          "R^{;c}{R_c}^{e;f}{R_e}^{h;i}R_{fi;h}",
          "R^{;c}{R_c}^{e;f}{R_e}^{h;i}R_{hi;f}",
          "R^{;c}{R_c}^{e;f}{R_f}^{h;i}R_{hi;e}",
          "R^{;c}{R_c}^{e;f}{R^{hi}}_{;e}R_{hi;f}",
          "R^{;c}{R^{ef}}_{;c}{R_e}^{h;i}R_{fh;i}",
          "R^{;c}{R^{ef}}_{;c}{R_e}^{h;i}R_{fi;h}",
          "R^{;c}{R^{ef}}_{;c}{R_e}^{h;i}R_{hi;f}",
          "R^{;c}{R^{ef}}_{;c}{R^{hi}}_{;e}R_{hi;f}",
          "R^{bc;d}{R_{bc}}^{;f}{R_d}^{h;i}R_{fh;i}",
          "R^{bc;d}{R_{bc}}^{;f}{R_d}^{h;i}R_{fi;h}",
          "R^{bc;d}{R_{bc}}^{;f}{R_d}^{h;i}R_{hi;f}",
          "R^{bc;d}{R_{bd}}^{;f}{R_c}^{h;i}R_{fh;i}",
          "R^{bc;d}{R_{bd}}^{;f}{R_c}^{h;i}R_{fi;h}",
          "R^{bc;d}{R_{bd}}^{;f}{R_c}^{h;i}R_{hi;f}",
          "R^{bc;d}{R_{bd}}^{;f}{R_f}^{h;i}R_{hi;c}",
          "R^{bc;d}{R_{bc}}^{;f}{R^{hi}}_{;d}R_{hi;f}",
          "R^{bc;d}{{R_b}^f}_{;d}{R_c}^{h;i}R_{fh;i}",
          "R^{bc;d}{R_b}^{f;g}{R_{cf}}^{;i}R_{dg;i}",
          "R^{bc;d}{R_b}^{f;g}{R_{cg}}^{;i}R_{df;i}",
          "R^{bc;d}{R_b}^{f;g}{R_{cg}}^{;i}R_{di;f}",
      };
    case BuiltinBasis::fkwc_rank0:
      return {"R",
              "R^{;a}_{;a}", "R R", "R_{pq}R^{pq}",
              "R^{;a}_{;ab}^{;b}", "R R^{;a}_{;a}", "R_{;pq}R^{pq}", "R_{pq}R^{pq;r}_{;r}", "R_{;p}R^{;p}",
              "R_{pq;r}R^{pq;r}", "R_{pq;r}R^{pr;q}", "R R R", "R R_{pq}R^{pq}", "R_{pq}R^p_{~r}R^{qr}"};
    case BuiltinBasis::components:
      return {"R", "R_a^b R_b^a", "R_a^b R_b^c R_c^a", "R_{ab;c}R^{ab;c}", "R_{ab;c}R_{de;f}R^{ab;f}R^{de;c}"};
  }
  return {};
}

std::vector<Invariant> builtin_basis(BuiltinBasis kind) {
  std::vector<Invariant> out;
  for (const auto& t : builtin_texts(kind)) out.push_back(parse_invariant(t));
  return out;
}

BuiltinBasis builtin_from_name(const std::string& name) {
  if (name == "zeroth") return BuiltinBasis::zeroth;
  if (name == "first29") return BuiltinBasis::first29;
  if (name == "fkwc_rank0") return BuiltinBasis::fkwc_rank0;
  if (name == "components") return BuiltinBasis::components;
  throw std::invalid_argument("unknown builtin basis '" + name + "'");
}

}  // namespace curv3d
