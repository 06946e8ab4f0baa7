#include "curv3d/independence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "curv3d/classify.hpp"
#include "curv3d/frames.hpp"

namespace curv3d {

using expr::Expr;
using expr::Point;

namespace {

template <class F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < count; i += threads) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& J, const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), J.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = J.row(rows[i]);
  return out;
}

RankReport majority(std::vector<RankReport> reports) {
  if (reports.empty()) throw std::invalid_argument("rank vote needs at least one sample");
  std::map<int, int> tally;
  for (const auto& r : reports) ++tally[r.rank];
  auto best = std::max_element(tally.begin(), tally.end(), [](const auto& a, const auto& b) {
    return a.second < b.second || (a.second == b.second && a.first < b.first);
  });
  RankReport out;
  for (const auto& r : reports) out.votes.push_back(r.rank);
  for (const auto& r : reports)
    if (r.rank == best->first) {
      out.rank = r.rank;
      out.singular_values = r.singular_values;
      out.gap = r.gap;
      break;
    }
  out.stable = 2 * best->second > static_cast<int>(reports.size());
  return out;
}

RankReport max_over(std::vector<RankReport> reports) {
  if (reports.empty()) throw DomainError("no point could be evaluated");
  RankReport out;
  for (const auto& r : reports) out.votes.push_back(r.rank);
  const RankReport* best = &reports[0];
  for (const auto& r : reports)
    if (r.rank > best->rank) best = &r;
  out.rank = best->rank;
  out.singular_values = best->singular_values;
  out.gap = best->gap;
  return out;
}

Point shifted(const Point& p, const std::string& coord, double h) {
  Point q = p;
  q.set(coord, p.at(coord).to_double() + h);
  return q;
}

}  // namespace

nlohmann::json RankReport::to_json() const {
  nlohmann::json j{{"rank", rank}, {"singular_values", singular_values}, {"votes", votes}, {"stable", stable}};
  j["gap"] = std::isfinite(gap) ? nlohmann::json(gap) : nlohmann::json("inf");
  return j;
}

RankReport matrix_rank(const Eigen::MatrixXd& J, double rel_tol) {
  RankReport r;
  if (J.rows() == 0 || J.cols() == 0) {
    r.gap = std::numeric_limits<double>::infinity();
    return r;
  }
  Eigen::MatrixXd N = J;
  for (Eigen::Index i = 0; i < N.rows(); ++i) {
    double n = N.row(i).norm();
    if (n > 0) N.row(i) /= n;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(N);
  auto s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) r.singular_values.push_back(s(i));
  double smax = s.size() ? s(0) : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * smax && smax > 0) ++r.rank;
  if (r.rank == 0 || r.rank >= s.size())
    r.gap = std::numeric_limits<double>::infinity();
  else
    r.gap = s(r.rank) > 0 ? s(r.rank - 1) / s(r.rank) : std::numeric_limits<double>::infinity();
  return r;
}

// ------------------------------------------------------------ functional

RankReport functional_rank(const std::vector<Invariant>& invariants, const MetricSpec& g, const std::vector<Point>& points,
                           const IndependenceOptions& opt) {
  int max_d = 0;
  for (const auto& inv : invariants) max_d = std::max(max_d, inv.max_derivative());
  std::vector<RankReport> reports;
  for (const auto& p : points) {
    try {
      g.check_at(p);
      auto fc = frame_jets(jet_curvature(g, p, max_d, 1));
      Eigen::MatrixXd J(static_cast<Eigen::Index>(invariants.size()), g.dim);
      for (std::size_t i = 0; i < invariants.size(); ++i) {
        Jet v = evaluate(invariants[i], fc);
        for (int mu = 0; mu < g.dim; ++mu) J(static_cast<Eigen::Index>(i), mu) = v.gradient(mu);
      }
      reports.push_back(matrix_rank(J, opt.exact_rel_tol));
    } catch (const expr::EvalError&) {
    } catch (const DomainError&) {
    }
  }
  return max_over(std::move(reports));
}

RankReport functional_rank(const std::vector<Expr>& fields, const std::vector<std::string>& coords,
                           const std::vector<Point>& points, const expr::FunctionTable* functions,
                           const IndependenceOptions& opt) {
  std::vector<RankReport> reports;
  for (const auto& p : points) {
    try {
      auto jets = taylor_many(fields, coords, p, 1, functions);
      Eigen::MatrixXd J(static_cast<Eigen::Index>(fields.size()), static_cast<Eigen::Index>(coords.size()));
      for (std::size_t i = 0; i < fields.size(); ++i)
        for (std::size_t mu = 0; mu < coords.size(); ++mu)
          J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(mu)) = jets[i].gradient(static_cast<int>(mu));
      reports.push_back(matrix_rank(J, opt.exact_rel_tol));
    } catch (const expr::EvalError&) {
    }
  }
  return max_over(std::move(reports));
}

Eigen::MatrixXd coordinate_jacobian(const PointFunction& f, const std::vector<std::string>& coords, const Point& p,
                                    double h) {
  auto base = f(p);
  Eigen::MatrixXd J(static_cast<Eigen::Index>(base.size()), static_cast<Eigen::Index>(coords.size()));
  for (std::size_t mu = 0; mu < coords.size(); ++mu) {
    const auto& c = coords[mu];
    auto p2 = f(shifted(p, c, 2 * h)), p1 = f(shifted(p, c, h)), m1 = f(shifted(p, c, -h)), m2 = f(shifted(p, c, -2 * h));
    for (std::size_t i = 0; i < base.size(); ++i)
      J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(mu)) = (-p2[i] + 8 * p1[i] - 8 * m1[i] + m2[i]) / (12 * h);
  }
  return J;
}

RankReport functional_rank(const PointFunction& f, const std::vector<std::string>& coords, const std::vector<Point>& points,
                           const IndependenceOptions& opt) {
  std::vector<RankReport> reports;
  for (const auto& p : points) {
    try {
      reports.push_back(matrix_rank(coordinate_jacobian(f, coords, p, opt.coord_step), opt.fd_rel_tol));
    } catch (const expr::EvalError&) {
    } catch (const DomainError&) {
    } catch (const FrameError&) {
    }
  }
  return max_over(std::move(reports));
}

// ------------------------------------------------------------- algebraic

Eigen::MatrixXd jet_jacobian(const SampleFunction& f, const JetSample& s, double step) {
  std::size_t n = s.coeffs.size();
  Eigen::MatrixXd J;
  JetSample work = s;
  for (std::size_t j = 0; j < n; ++j) {
    double h = step * std::max(1.0, std::abs(s.coeffs[j]));
    work.coeffs[j] = s.coeffs[j] + h;
    auto plus = f(work);
    work.coeffs[j] = s.coeffs[j] - h;
    auto minus = f(work);
    work.coeffs[j] = s.coeffs[j];
    if (j == 0) J.resize(static_cast<Eigen::Index>(plus.size()), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < plus.size(); ++i)
      J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (plus[i] - minus[i]) / (2 * h);
  }
  return J;
}

RankReport algebraic_rank(const std::vector<Eigen::MatrixXd>& jacobians, const std::vector<int>& rows, double rel_tol) {
  std::vector<RankReport> reports;
  for (const auto& J : jacobians) reports.push_back(matrix_rank(select_rows(J, rows), rel_tol));
  return majority(std::move(reports));
}

namespace {

std::vector<Eigen::MatrixXd> jacobians(const SampleFunction& f, const std::vector<JetSample>& samples,
                                       const IndependenceOptions& opt) {
  std::vector<Eigen::MatrixXd> out(samples.size());
  parallel_for(static_cast<int>(samples.size()), opt.threads, [&](int i) {
    out[static_cast<std::size_t>(i)] = jet_jacobian(f, samples[static_cast<std::size_t>(i)], opt.jet_step);
  });
  return out;
}

std::vector<int> iota(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

}  // namespace

RankReport algebraic_rank(const SampleFunction& f, const std::vector<JetSample>& samples, const IndependenceOptions& opt) {
  auto js = jacobians(f, samples, opt);
  return algebraic_rank(js, iota(static_cast<int>(js.at(0).rows())), opt.fd_rel_tol);
}

RankReport algebraic_rank(const std::vector<Invariant>& invariants, const std::vector<JetSample>& samples,
                          const IndependenceOptions& opt) {
  if (invariants.empty()) return RankReport{};
  return algebraic_rank(invariant_function(invariants), samples, opt);
}

SampleFunction invariant_function(const std::vector<Invariant>& invariants) {
  int max_d = 0;
  for (const auto& inv : invariants) max_d = std::max(max_d, inv.max_derivative());
  return [invariants, max_d](const JetSample& s) {
    if (s.order < 2 + max_d) throw std::invalid_argument("jet order too low for the invariants");
    auto fc = sample_curvature(s, max_d);
    std::vector<double> out;
    out.reserve(invariants.size());
    for (const auto& inv : invariants) out.push_back(evaluate(inv, fc));
    return out;
  };
}

SampleFunction cartan_function() {
  return [](const JetSample& s) {
    if (s.order < 3) throw std::invalid_argument("Cartan scalars need third-order jets");
    return cartan_scalars(canonicalize_ptype1(frame_point(jet_curvature(s.metric(), 1))));
  };
}

std::vector<JetSample> draw_jet_samples(std::uint64_t seed, int count, int order, bool ptype1_only, double min_gap) {
  JetSampler sampler(seed, order);
  std::vector<JetSample> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > 100 * std::max(1, count)) throw std::runtime_error("could not draw enough P-type I samples");
    JetSample s = sampler.next();
    if (ptype1_only) {
      auto fp = frame_point(jet_curvature(s.metric(std::max(order, 3)), 1));
      if (segre_type(fp.fc).tag != "{1,11}") continue;
      try {
        auto cf = canonicalize_ptype1(fp);
        double scale = std::max({std::abs(cf.mu[0]), std::abs(cf.mu[1]), std::abs(cf.mu[2])});
        if (cf.min_gap < min_gap * scale) continue;
      } catch (const FrameError&) {
        continue;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

// -------------------------------------------------------------- filtering

nlohmann::json FilterResult::to_json(const std::vector<std::string>& names) const {
  auto label = [&](const std::vector<int>& idx) {
    nlohmann::json a = nlohmann::json::array();
    for (int i : idx) {
      if (names.empty())
        a.push_back(i);
      else
        a.push_back(names.at(static_cast<std::size_t>(i)));
    }
    return a;
  };
  return {{"rank", rank.rank}, {"kept", label(kept)}, {"dropped", label(dropped)}, {"report", rank.to_json()}};
}

FilterResult filter_independent(const SampleFunction& f, const std::vector<JetSample>& samples,
                                const IndependenceOptions& opt) {
  auto js = jacobians(f, samples, opt);
  FilterResult out;
  int n = static_cast<int>(js.at(0).rows());
  int current = 0;
  for (int i = 0; i < n; ++i) {
    auto trial = out.kept;
    trial.push_back(i);
    RankReport r = algebraic_rank(js, trial, opt.fd_rel_tol);
    if (r.rank > current) {
      out.kept = trial;
      current = r.rank;
    } else {
      out.dropped.push_back(i);
    }
  }
  out.rank = algebraic_rank(js, out.kept, opt.fd_rel_tol);
  return out;
}

FilterResult filter_independent(const std::vector<Invariant>& invariants, const std::vector<JetSample>& samples,
                                const IndependenceOptions& opt) {
  if (invariants.empty()) return FilterResult{};
  return filter_independent(invariant_function(invariants), samples, opt);
}

// ------------------------------------------------------------ Cartan filter

ScalarFamily cartan_family(const MetricSpec& g) {
  ScalarFamily f;
  f.names = cartan_scalar_names();
  f.coords = g.coords;
  f.eval = [g](const Point& p) { return cartan_scalars(canonicalize_ptype1(frame_point(g, p))); };
  return f;
}

ScalarFamily invariant_family(const MetricSpec& g, const std::vector<Invariant>& invariants) {
  ScalarFamily f;
  for (const auto& inv : invariants) f.names.push_back(inv.text);
  f.coords = g.coords;
  int max_d = 0;
  for (const auto& inv : invariants) max_d = std::max(max_d, inv.max_derivative());
  f.eval = [g, invariants, max_d](const Point& p) {
    auto fc = frame_values(g, p, max_d);
    std::vector<double> out;
    for (const auto& inv : invariants) out.push_back(evaluate(inv, fc));
    return out;
  };
  return f;
}

ScalarFamily expression_family(const std::vector<std::string>& names, const std::vector<Expr>& fields,
                               const std::vector<std::string>& coords, const expr::FunctionTable* functions) {
  ScalarFamily f;
  f.names = names;
  f.coords = coords;
  std::vector<Expr> bound = fields;
  if (functions)
    for (auto& e : bound) e = expr::bind_functions(e, *functions);
  f.eval = [bound](const Point& p) { return expr::evaluate_many(bound, p); };
  return f;
}

namespace {

// Exponent vectors of total degree <= d in k variables.
void monomials(int k, int d, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  int used = 0;
  for (int e : cur) used += e;
  for (int e = 0; e + used <= d; ++e) {
    cur.push_back(e);
    monomials(k, d, cur, out);
    cur.pop_back();
  }
}

int nullity(const Eigen::MatrixXd& M, double rel_tol) {
  Eigen::MatrixXd N = M;
  for (Eigen::Index j = 0; j < N.cols(); ++j) {
    double n = N.col(j).norm();
    if (n > 0) N.col(j) /= n;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(N);
  auto s = svd.singularValues();
  double smax = s.size() ? s(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * smax) ++rank;
  return static_cast<int>(N.cols()) - rank;
}

}  // namespace

DependenceOracle polynomial_fit_oracle(const ScalarFamily& family, const std::vector<Point>& points, int max_degree,
                                       double rel_tol) {
  // Values at all points, scaled to [-1, 1] per member; constant members are flagged.
  auto table = std::make_shared<std::vector<std::vector<double>>>();
  for (const auto& p : points) table->push_back(family.eval(p));
  std::size_t n = family.names.size();
  auto constant = std::make_shared<std::vector<bool>>(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& row : *table) {
      lo = std::min(lo, row[i]);
      hi = std::max(hi, row[i]);
    }
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    if (half <= 1e-10 * std::max(1.0, std::abs(mid))) {
      (*constant)[i] = true;
      continue;
    }
    for (auto& row : *table) row[i] = (row[i] - mid) / half;
  }
  return [table, constant, max_degree, rel_tol](const std::vector<int>& basis, int candidate) {
    if ((*constant)[static_cast<std::size_t>(candidate)]) return true;
    std::vector<int> vars;
    for (int b : basis)
      if (!(*constant)[static_cast<std::size_t>(b)]) vars.push_back(b);
    vars.push_back(candidate);
    int k = static_cast<int>(vars.size());
    auto rows = static_cast<Eigen::Index>(table->size());
    for (int d = max_degree; d >= 1; --d) {
      std::vector<std::vector<int>> mons;
      std::vector<int> cur;
      monomials(k, d, cur, mons);
      if (2 * static_cast<Eigen::Index>(mons.size()) > rows) continue;
      Eigen::MatrixXd all(rows, static_cast<Eigen::Index>(mons.size()));
      std::vector<Eigen::Index> without;
      for (std::size_t m = 0; m < mons.size(); ++m) {
        if (mons[m].back() == 0) without.push_back(static_cast<Eigen::Index>(m));
        for (Eigen::Index r = 0; r < rows; ++r) {
          double v = 1;
          for (int i = 0; i < k; ++i) v *= std::pow((*table)[static_cast<std::size_t>(r)][static_cast<std::size_t>(vars[static_cast<std::size_t>(i)])], mons[m][static_cast<std::size_t>(i)]);
          all(r, static_cast<Eigen::Index>(m)) = v;
        }
      }
      Eigen::MatrixXd base(rows, static_cast<Eigen::Index>(without.size()));
      for (std::size_t m = 0; m < without.size(); ++m) base.col(static_cast<Eigen::Index>(m)) = all.col(without[m]);
      return nullity(all, rel_tol) > nullity(base, rel_tol);
    }
    return false;
  };
}

DependenceOracle jet_rank_oracle(const SampleFunction& f, const std::vector<JetSample>& samples,
                                 const IndependenceOptions& opt) {
  auto js = std::make_shared<std::vector<Eigen::MatrixXd>>(jacobians(f, samples, opt));
  double tol = opt.fd_rel_tol;
  return [js, tol](const std::vector<int>& basis, int candidate) {
    auto with = basis;
    with.push_back(candidate);
    int dependent = 0;
    for (const auto& J : *js) {
      int a = basis.empty() ? 0 : matrix_rank(select_rows(J, basis), tol).rank;
      int b = matrix_rank(select_rows(J, with), tol).rank;
      if (b == a) ++dependent;
    }
    return 2 * dependent > static_cast<int>(js->size());
  };
}

nlohmann::json FilterState::to_json() const {
  auto label = [&](const std::vector<int>& idx) {
    nlohmann::json a = nlohmann::json::array();
    for (int i : idx) a.push_back(names.at(static_cast<std::size_t>(i)));
    return a;
  };
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : levels)
    lv.push_back({{"q", l.q}, {"chosen", label(l.chosen)}, {"dependent", label(l.dependent)}, {"residual", label(l.residual)}});
  return {{"q", q},
          {"levels", lv},
          {"f_tilde", label(f_tilde)},
          {"f_omega", label(f_omega)},
          {"constants", label(constants)},
          {"functional_rank", functional_rank},
          {"terminated", terminated}};
}

FilterState cartan_filter(const ScalarFamily& family, const std::vector<Point>& points, const DependenceOracle& dependent,
                          const FilterOptions& opt) {
  if (points.empty()) throw std::invalid_argument("cartan_filter needs points");
  int n = static_cast<int>(family.names.size());
  FilterState st;
  st.names = family.names;

  // Coordinate Jacobians at each point and the value spread of each member.
  std::vector<Eigen::MatrixXd> jac;
  std::vector<double> lo(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity()),
      hi(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
  for (const auto& p : points) {
    auto v = family.eval(p);
    for (int i = 0; i < n; ++i) {
      lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)]);
      hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)]);
    }
    jac.push_back(coordinate_jacobian(family.eval, family.coords, p, opt.coord_step));
  }
  std::vector<bool> is_const(static_cast<std::size_t>(n));
  // Constant members only contribute rounding noise to the Jacobian.
  auto frank = [&](const std::vector<int>& rows) {
    std::vector<int> live;
    for (int i : rows)
      if (!is_const[static_cast<std::size_t>(i)]) live.push_back(i);
    if (live.empty()) return 0;
    int best = 0;
    for (const auto& J : jac) best = std::max(best, matrix_rank(select_rows(J, live), opt.rel_tol).rank);
    return best;
  };
  for (int i = 0; i < n; ++i) {
    double mid = 0.5 * (lo[static_cast<std::size_t>(i)] + hi[static_cast<std::size_t>(i)]);
    double spread = hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)];
    double grad = 0;
    for (const auto& J : jac) grad = std::max(grad, J.row(i).norm());
    is_const[static_cast<std::size_t>(i)] =
        spread <= opt.constant_tol * std::max(1.0, std::abs(mid)) && grad <= 1e3 * opt.constant_tol * std::max(1.0, std::abs(mid));
    if (is_const[static_cast<std::size_t>(i)]) st.constants.push_back(i);
  }
  std::vector<int> all;
  for (int i = 0; i < n; ++i) all.push_back(i);
  st.functional_rank = frank(all);

  // Greedy functional selection from `from`, capped.
  auto choose = [&](const std::vector<int>& from, int cap) {
    std::vector<int> chosen;
    int r = 0;
    for (int i : from) {
      if (static_cast<int>(chosen.size()) >= cap) break;
      if (is_const[static_cast<std::size_t>(i)]) continue;
      auto trial = chosen;
      trial.push_back(i);
      int rt = frank(trial);
      if (rt > r) {
        chosen = trial;
        r = rt;
      }
    }
    return chosen;
  };
  std::vector<int> known;  // union of the I^(j)
  auto reduce = [&](const std::vector<int>& from, const std::vector<int>& chosen, FilterLevel& level) {
    for (int i : from) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      if (is_const[static_cast<std::size_t>(i)] || dependent(known, i))
        level.dependent.push_back(i);
      else
        level.residual.push_back(i);
    }
  };

  if (st.functional_rank == 0) {
    // Every member is constant: the distinct values are the invariants.
    std::vector<double> seen;
    for (int i : all) {
      double v = 0.5 * (lo[static_cast<std::size_t>(i)] + hi[static_cast<std::size_t>(i)]);
      bool dup = std::any_of(seen.begin(), seen.end(), [&](double s) {
        return std::abs(s - v) <= opt.constant_tol * std::max(1.0, std::abs(v));
      });
      if (!dup) {
        seen.push_back(v);
        st.f_omega.push_back(i);
      }
    }
    FilterLevel l0;
    st.levels.push_back(l0);
    st.terminated = true;
    return st;
  }

  FilterLevel l0;
  l0.q = 0;
  l0.chosen = choose(all, 3);
  known = l0.chosen;
  reduce(all, l0.chosen, l0);
  st.levels.push_back(l0);
  std::vector<int> residual = l0.residual;
  int q = 0;
  while (static_cast<int>(residual.size()) >= 3) {
    if (q >= opt.max_q) break;
    ++q;
    FilterLevel lq;
    lq.q = q;
    lq.chosen = choose(residual, q == 1 && opt.four_at_first_level ? 4 : 3);
    if (lq.chosen.empty()) break;
    known.insert(known.end(), lq.chosen.begin(), lq.chosen.end());
    reduce(residual, lq.chosen, lq);
    st.levels.push_back(lq);
    residual = lq.residual;
  }
  st.q = q;
  st.terminated = residual.size() < 3;
  for (int i : residual)
    if (!dependent(known, i)) st.f_tilde.push_back(i);
  st.f_omega = known;
  st.f_omega.insert(st.f_omega.end(), st.f_tilde.begin(), st.f_tilde.end());
  return st;
}

}  // namespace curv3d
