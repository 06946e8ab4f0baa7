#pragma once

// Dense component tensors and the index algebra shared by the symbolic
// (Expr) and Taylor-jet (Jet) curvature pipelines.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "curv3d/expr.hpp"
#include "curv3d/jet.hpp"

namespace curv3d {

enum class Variance { covariant, contravariant };

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static double constant(double, const Rational& r) { return to_double(r); }
  static bool is_zero(double v) { return v == 0.0; }
};

template <>
struct ScalarOps<expr::Expr> {
  static expr::Expr constant(const expr::Expr&, const Rational& r) { return expr::Expr(r); }
  static bool is_zero(const expr::Expr& e) { return e.is_zero(); }
};

template <>
struct ScalarOps<Jet> {
  static Jet constant(const Jet& like, const Rational& r) { return Jet(like.space_ptr(), to_double(r)); }
  static bool is_zero(const Jet&) { return false; }
};

template <class S>
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, std::vector<Variance> slots, const S& fill) : dim_(dim), slots_(std::move(slots)) {
    std::size_t n = 1;
    for (std::size_t i = 0; i < slots_.size(); ++i) n *= static_cast<std::size_t>(dim_);
    data_.assign(n, fill);
  }

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(slots_.size()); }
  const std::vector<Variance>& slots() const { return slots_; }
  Variance slot(int i) const { return slots_.at(static_cast<std::size_t>(i)); }
  std::size_t size() const { return data_.size(); }
  std::vector<S>& data() { return data_; }
  const std::vector<S>& data() const { return data_; }

  std::size_t offset(const int* idx) const {
    std::size_t off = 0;
    for (std::size_t i = 0; i < slots_.size(); ++i) off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx[i]);
    return off;
  }
  void unflatten(std::size_t flat, int* idx) const {
    for (int i = rank() - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(flat % static_cast<std::size_t>(dim_));
      flat /= static_cast<std::size_t>(dim_);
    }
  }

  S& operator[](std::size_t flat) { return data_[flat]; }
  const S& operator[](std::size_t flat) const { return data_[flat]; }
  S& operator()(std::initializer_list<int> idx) { return data_[offset(idx.begin())]; }
  const S& operator()(std::initializer_list<int> idx) const { return data_[offset(idx.begin())]; }
  S& at(const std::vector<int>& idx) { return data_[offset(idx.data())]; }
  const S& at(const std::vector<int>& idx) const { return data_[offset(idx.data())]; }

 private:
  int dim_ = 0;
  std::vector<Variance> slots_;
  std::vector<S> data_;
};

namespace talg {

constexpr int kMaxRank = 12;

template <class S>
S mul_acc(const S& acc, const S& a, const S& b) {
  if (ScalarOps<S>::is_zero(a) || ScalarOps<S>::is_zero(b)) return acc;
  if (ScalarOps<S>::is_zero(acc)) return a * b;
  return acc + a * b;
}

template <class S>
S det_minor(const Tensor<S>& m, std::vector<int>& rows, std::vector<int>& cols) {
  if (rows.size() == 1) return m({rows[0], cols[0]});
  S zero = ScalarOps<S>::constant(m[0], 0);
  S acc = zero;
  int r = rows[0];
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const S& entry = m({r, cols[j]});
    if (ScalarOps<S>::is_zero(entry)) continue;
    std::vector<int> sub_cols;
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (k != j) sub_cols.push_back(cols[k]);
    S term = entry * det_minor(m, sub_rows, sub_cols);
    if (ScalarOps<S>::is_zero(acc))
      acc = (j % 2 == 0) ? term : -term;
    else
      acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

template <class S>
S determinant(const Tensor<S>& m) {
  std::vector<int> rows, cols;
  for (int i = 0; i < m.dim(); ++i) {
    rows.push_back(i);
    cols.push_back(i);
  }
  return det_minor(m, rows, cols);
}

/// Inverse of a rank-2 tensor by cofactors; slots are flipped.
template <class S>
Tensor<S> inverse(const Tensor<S>& m) {
  int n = m.dim();
  S det = determinant(m);
  Tensor<S> out(n, {Variance::contravariant, Variance::contravariant}, ScalarOps<S>::constant(m[0], 0));
  if (n == 1) {
    out({0, 0}) = ScalarOps<S>::constant(m[0], 1) / det;
    return out;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<int> rows, cols;
      for (int k = 0; k < n; ++k) {
        if (k != j) rows.push_back(k);
        if (k != i) cols.push_back(k);
      }
      S c = det_minor(m, rows, cols);
      if (ScalarOps<S>::is_zero(c)) continue;
      if ((i + j) % 2) c = -c;
      out({i, j}) = c / det;
    }
  }
  return out;
}

/// Gamma^a_{bc} = 1/2 g^{ad} (d_b g_dc + d_c g_db - d_d g_bc).
template <class S, class Deriv>
Tensor<S> christoffel(const Tensor<S>& g, const Tensor<S>& ginv, Deriv&& deriv) {
  int n = g.dim();
  S zero = ScalarOps<S>::constant(g[0], 0);
  // dg[(d*n + c)*n + b] = d_b g_dc
  std::vector<S> dg(static_cast<std::size_t>(n * n * n), zero);
  for (int d = 0; d < n; ++d)
    for (int c = d; c < n; ++c)
      for (int b = 0; b < n; ++b) {
        S v = deriv(g({d, c}), b);
        dg[static_cast<std::size_t>((d * n + c) * n + b)] = v;
        dg[static_cast<std::size_t>((c * n + d) * n + b)] = v;
      }
  auto D = [&](int d, int c, int b) -> const S& { return dg[static_cast<std::size_t>((d * n + c) * n + b)]; };
  // Christoffel of the first kind, then raise.
  std::vector<S> first(static_cast<std::size_t>(n * n * n), zero);
  S half = ScalarOps<S>::constant(g[0], Rational(1, 2));
  for (int d = 0; d < n; ++d)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        S v = D(d, c, b);
        v = ScalarOps<S>::is_zero(v) ? D(d, b, c) : (ScalarOps<S>::is_zero(D(d, b, c)) ? v : v + D(d, b, c));
        const S& w = D(b, c, d);
        if (!ScalarOps<S>::is_zero(w)) v = ScalarOps<S>::is_zero(v) ? -w : v - w;
        if (!ScalarOps<S>::is_zero(v)) v = half * v;
        first[static_cast<std::size_t>((d * n + b) * n + c)] = v;
        first[static_cast<std::size_t>((d * n + c) * n + b)] = v;
      }
  Tensor<S> gamma(n, {Variance::contravariant, Variance::covariant, Variance::covariant}, zero);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        S acc = zero;
        for (int d = 0; d < n; ++d) acc = mul_acc(acc, ginv({a, d}), first[static_cast<std::size_t>((d * n + b) * n + c)]);
        gamma({a, b, c}) = acc;
        gamma({a, c, b}) = acc;
      }
  return gamma;
}

/// R^a_{bcd} = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb.
template <class S, class Deriv>
Tensor<S> riemann(const Tensor<S>& gamma, Deriv&& deriv) {
  int n = gamma.dim();
  S zero = ScalarOps<S>::constant(gamma[0], 0);
  // dG[(a,b,c) , e] = d_e G^a_bc
  std::vector<S> dG(gamma.size() * static_cast<std::size_t>(n), zero);
  for (std::size_t f = 0; f < gamma.size(); ++f) {
    int idx[3];
    gamma.unflatten(f, idx);
    if (idx[1] > idx[2]) {
      std::array<int, 3> sw{idx[0], idx[2], idx[1]};
      std::size_t g2 = gamma.offset(sw.data());
      for (int e = 0; e < n; ++e) dG[f * static_cast<std::size_t>(n) + static_cast<std::size_t>(e)] = dG[g2 * static_cast<std::size_t>(n) + static_cast<std::size_t>(e)];
      continue;
    }
    for (int e = 0; e < n; ++e) {
      const S& comp = gamma[f];
      dG[f * static_cast<std::size_t>(n) + static_cast<std::size_t>(e)] =
          ScalarOps<S>::is_zero(comp) ? zero : deriv(comp, e);
    }
  }
  auto dGam = [&](int a, int b, int c, int e) -> const S& {
    return dG[static_cast<std::size_t>(((a * n + b) * n + c) * n + e)];
  };
  Tensor<S> R(n, {Variance::contravariant, Variance::covariant, Variance::covariant, Variance::covariant}, zero);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          S acc = dGam(a, d, b, c);
          const S& t = dGam(a, c, b, d);
          if (!ScalarOps<S>::is_zero(t)) acc = ScalarOps<S>::is_zero(acc) ? -t : acc - t;
          for (int e = 0; e < n; ++e) {
            acc = mul_acc(acc, gamma({a, c, e}), gamma({e, d, b}));
            const S& x = gamma({a, d, e});
            const S& y = gamma({e, c, b});
            if (!ScalarOps<S>::is_zero(x) && !ScalarOps<S>::is_zero(y)) {
              S p = x * y;
              acc = ScalarOps<S>::is_zero(acc) ? -p : acc - p;
            }
          }
          R({a, b, c, d}) = acc;
          R({a, b, d, c}) = ScalarOps<S>::is_zero(acc) ? zero : -acc;
        }
  return R;
}

/// R_ab = R^c_{acb}.
template <class S>
Tensor<S> ricci(const Tensor<S>& Rup) {
  int n = Rup.dim();
  S zero = ScalarOps<S>::constant(Rup[0], 0);
  Tensor<S> out(n, {Variance::covariant, Variance::covariant}, zero);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      S acc = zero;
      for (int c = 0; c < n; ++c) {
        const S& v = Rup({c, a, c, b});
        if (ScalarOps<S>::is_zero(v)) continue;
        acc = ScalarOps<S>::is_zero(acc) ? v : acc + v;
      }
      out({a, b}) = acc;
      out({b, a}) = acc;
    }
  return out;
}

template <class S>
S trace2(const Tensor<S>& T, const Tensor<S>& ginv) {
  int n = T.dim();
  S acc = ScalarOps<S>::constant(T[0], 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) acc = mul_acc(acc, ginv({a, b}), T({a, b}));
  return acc;
}

/// Contracts slot `slot` of T with the rank-2 tensor m (m_{x s} T^{..s..}); the slot takes `to`.
template <class S>
Tensor<S> transform_slot(const Tensor<S>& T, const Tensor<S>& m, int slot, Variance to) {
  int n = T.dim();
  if (slot < 0 || slot >= T.rank()) throw std::out_of_range("slot out of range");
  auto slots = T.slots();
  slots[static_cast<std::size_t>(slot)] = to;
  S zero = ScalarOps<S>::constant(T[0], 0);
  Tensor<S> out(n, slots, zero);
  int idx[kMaxRank];
  for (std::size_t f = 0; f < out.size(); ++f) {
    out.unflatten(f, idx);
    int x = idx[slot];
    S acc = zero;
    for (int s = 0; s < n; ++s) {
      idx[slot] = s;
      acc = mul_acc(acc, m({x, s}), T[T.offset(idx)]);
    }
    out[f] = acc;
  }
  return out;
}

template <class S>
Tensor<S> lower_index(const Tensor<S>& T, const Tensor<S>& g, int slot) {
  if (T.slot(slot) == Variance::covariant) return T;
  return transform_slot(T, g, slot, Variance::covariant);
}

template <class S>
Tensor<S> raise_index(const Tensor<S>& T, const Tensor<S>& ginv, int slot) {
  if (T.slot(slot) == Variance::contravariant) return T;
  return transform_slot(T, ginv, slot, Variance::contravariant);
}

template <class S>
Tensor<S> lower_all(Tensor<S> T, const Tensor<S>& g) {
  for (int s = 0; s < T.rank(); ++s) T = lower_index(T, g, s);
  return T;
}

/// Contracts slots i < j. Two covariant slots get an inverse metric, two contravariant slots a metric.
template <class S>
Tensor<S> contract(const Tensor<S>& T, int i, int j, const Tensor<S>& g, const Tensor<S>& ginv) {
  if (i == j || i < 0 || j < 0 || i >= T.rank() || j >= T.rank()) throw std::out_of_range("slot out of range");
  if (i > j) std::swap(i, j);
  Tensor<S> src = T;
  if (T.slot(i) == T.slot(j))
    src = T.slot(j) == Variance::covariant ? raise_index(T, ginv, j) : lower_index(T, g, j);
  int n = T.dim();
  std::vector<Variance> slots;
  for (int s = 0; s < T.rank(); ++s)
    if (s != i && s != j) slots.push_back(T.slot(s));
  S zero = ScalarOps<S>::constant(T[0], 0);
  Tensor<S> out(n, slots, zero);
  int oidx[kMaxRank], idx[kMaxRank];
  std::size_t total = slots.empty() ? 1 : out.size();
  if (slots.empty()) out = Tensor<S>(n, {}, zero);
  for (std::size_t f = 0; f < total; ++f) {
    out.unflatten(f, oidx);
    int k = 0;
    for (int s = 0; s < T.rank(); ++s)
      if (s != i && s != j) idx[s] = oidx[k++];
    S acc = zero;
    for (int e = 0; e < n; ++e) {
      idx[i] = idx[j] = e;
      const S& v = src[src.offset(idx)];
      if (ScalarOps<S>::is_zero(v)) continue;
      acc = ScalarOps<S>::is_zero(acc) ? v : acc + v;
    }
    out[f] = acc;
  }
  return out;
}

/// Appends one covariant slot: (nabla T)_{... c} = d_c T + sum Gamma terms.
template <class S, class Deriv>
Tensor<S> covariant_derivative(const Tensor<S>& T, const Tensor<S>& gamma, Deriv&& deriv) {
  int n = T.dim();
  int r = T.rank();
  auto slots = T.slots();
  slots.push_back(Variance::covariant);
  S zero = ScalarOps<S>::constant(T[0], 0);
  Tensor<S> out(n, slots, zero);
  int idx[kMaxRank], src[kMaxRank];
  for (std::size_t f = 0; f < out.size(); ++f) {
    out.unflatten(f, idx);
    int c = idx[r];
    const S& base = T[T.offset(idx)];
    S acc = ScalarOps<S>::is_zero(base) ? zero : deriv(base, c);
    for (int s = 0; s < r; ++s) {
      std::copy(idx, idx + r, src);
      for (int e = 0; e < n; ++e) {
        src[s] = e;
        const S& t = T[T.offset(src)];
        if (ScalarOps<S>::is_zero(t)) continue;
        if (T.slot(s) == Variance::covariant) {
          const S& gm = gamma({e, c, idx[s]});
          if (ScalarOps<S>::is_zero(gm)) continue;
          S p = gm * t;
          acc = ScalarOps<S>::is_zero(acc) ? -p : acc - p;
        } else {
          acc = mul_acc(acc, gamma({idx[s], c, e}), t);
        }
      }
    }
    out[f] = acc;
  }
  return out;
}

/// 3D: R_abcd = g_ac R_bd + g_bd R_ac - g_ad R_bc - g_bc R_ad - R/2 (g_ac g_bd - g_ad g_bc).
template <class S>
Tensor<S> riemann_from_ricci(const Tensor<S>& g, const Tensor<S>& ric, const S& scalar) {
  if (g.dim() != 3) throw std::invalid_argument("riemann_from_ricci requires dimension 3");
  int n = 3;
  S zero = ScalarOps<S>::constant(g[0], 0);
  S half = ScalarOps<S>::constant(g[0], Rational(1, 2));
  S hr = half * scalar;
  Tensor<S> out(n, std::vector<Variance>(4, Variance::covariant), zero);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          S acc = zero;
          acc = mul_acc(acc, g({a, c}), ric({b, d}));
          acc = mul_acc(acc, g({b, d}), ric({a, c}));
          S neg = zero;
          neg = mul_acc(neg, g({a, d}), ric({b, c}));
          neg = mul_acc(neg, g({b, c}), ric({a, d}));
          S gg = zero;
          gg = mul_acc(gg, g({a, c}), g({b, d}));
          S gg2 = zero;
          gg2 = mul_acc(gg2, g({a, d}), g({b, c}));
          if (!ScalarOps<S>::is_zero(gg2)) gg = ScalarOps<S>::is_zero(gg) ? -gg2 : gg - gg2;
          if (!ScalarOps<S>::is_zero(neg)) acc = ScalarOps<S>::is_zero(acc) ? -neg : acc - neg;
          if (!ScalarOps<S>::is_zero(gg) && !ScalarOps<S>::is_zero(hr)) {
            S p = hr * gg;
            acc = ScalarOps<S>::is_zero(acc) ? -p : acc - p;
          }
          out({a, b, c, d}) = acc;
        }
  return out;
}

}  // namespace talg
}  // namespace curv3d
