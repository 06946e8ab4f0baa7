// Command-line driver: every subcommand prints one JSON report on stdout.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "curv3d/classify.hpp"
#include "curv3d/counting.hpp"
#include "curv3d/frames.hpp"
#include "curv3d/independence.hpp"
#include "curv3d/invariants.hpp"
#include "json.hpp"

using namespace curv3d;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { ok = 0, config_error = 1, unstable = 2, domain_error = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Unstable : std::runtime_error {
  explicit Unstable(json r) : std::runtime_error("unstable"), report(std::move(r)) {}
  json report;
};

struct Tolerances {
  double svd_rel_tol = 1e-8;
  double fd_rel_tol = 1e-6;
  double fd_step = 1e-5;
  double coord_step = 1e-3;
  double residual_tol = 1e-9;
  double classify_tol = 1e-9;
  int derivative_cap = 5;
  int samples = 5;

  json to_json() const {
    return {{"svd_rel_tol", svd_rel_tol},   {"fd_rel_tol", fd_rel_tol},       {"fd_step", fd_step},
            {"coord_step", coord_step},     {"residual_tol", residual_tol},   {"classify_tol", classify_tol},
            {"derivative_cap", derivative_cap}, {"samples", samples}};
  }
};

struct Common {
  std::string config_path;
  std::string output;
  std::uint64_t seed = 1;
  Tolerances tol;
  json overrides = json::object();
};

void load_config(Common& c) {
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw ConfigError("cannot read config " + c.config_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    auto& t = c.tol;
    t.svd_rel_tol = j.value("svd_rel_tol", t.svd_rel_tol);
    t.fd_rel_tol = j.value("fd_rel_tol", t.fd_rel_tol);
    t.fd_step = j.value("fd_step", t.fd_step);
    t.coord_step = j.value("coord_step", t.coord_step);
    t.residual_tol = j.value("residual_tol", t.residual_tol);
    t.classify_tol = j.value("classify_tol", t.classify_tol);
    t.derivative_cap = j.value("derivative_cap", t.derivative_cap);
    t.samples = j.value("samples", t.samples);
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  }
  for (const auto& [k, v] : c.overrides.items()) {
    if (k == "samples") c.tol.samples = v.get<int>();
    if (k == "residual_tol") c.tol.residual_tol = v.get<double>();
    if (k == "svd_rel_tol") c.tol.svd_rel_tol = v.get<double>();
    if (k == "classify_tol") c.tol.classify_tol = v.get<double>();
  }
  const auto& t = c.tol;
  for (double x : {t.svd_rel_tol, t.fd_rel_tol, t.fd_step, t.coord_step, t.residual_tol, t.classify_tol})
    if (!(x > 0)) throw ConfigError("tolerances must be positive");
  if (t.derivative_cap < 0 || t.derivative_cap > 5) throw ConfigError("derivative_cap must lie in [0, 5]");
  if (t.samples < 1) throw ConfigError("samples must be positive");
}

int threads_from_env() {
  const char* s = std::getenv("CURV3D_THREADS");
  if (!s) return 1;
  int n = std::atoi(s);
  return n > 0 ? n : 1;
}

IndependenceOptions independence_options(const Tolerances& t) {
  IndependenceOptions o;
  o.exact_rel_tol = t.svd_rel_tol;
  o.fd_rel_tol = t.fd_rel_tol;
  o.jet_step = t.fd_step;
  o.coord_step = t.coord_step;
  o.threads = threads_from_env();
  return o;
}

MetricSpec load_metric(const std::string& spec, std::uint64_t seed) {
  if (spec.empty()) throw ConfigError("--metric is required");
  if (spec == "random") return MetricSpec::random_polynomial(seed, 3);
  if (spec == "minkowski") return MetricSpec::minkowski();
  try {
    return MetricSpec::load(spec);
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("metric: ") + e.what());
  }
}

expr::Point origin(const MetricSpec& g) {
  expr::Point p;
  for (const auto& c : g.coords) p.set(c, 0);
  return p;
}

expr::Point parse_point(const std::string& text, const MetricSpec& g) {
  if (text.empty()) return origin(g);
  try {
    auto p = expr::Point::parse(text);
    for (const auto& c : g.coords)
      if (!p.contains(c)) throw ConfigError("point lacks coordinate " + c);
    return p;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("point: ") + e.what());
  }
}

/// One point per line, or a JSON array of point strings.
std::vector<expr::Point> load_points(const std::string& path, const MetricSpec& g) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read points file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  std::vector<std::string> lines;
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    try {
      lines = json::parse(text).get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("points: ") + e.what());
    }
  } else {
    std::stringstream ls(text);
    for (std::string line; std::getline(ls, line);)
      if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  }
  std::vector<expr::Point> pts;
  for (const auto& l : lines) pts.push_back(parse_point(l, g));
  if (pts.empty()) throw ConfigError("points file is empty");
  return pts;
}

/// Seeded cloud of points in a cube of half-width `spread` around p.
std::vector<expr::Point> point_cloud(const MetricSpec& g, const expr::Point& p, int count, double spread,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<expr::Point> pts{p};
  for (int i = 1; i < count; ++i) {
    expr::Point q;
    for (const auto& c : g.coords) q.set(c, p.at(c).to_double() + u(rng));
    pts.push_back(q);
  }
  return pts;
}

std::vector<Invariant> load_invariants(const std::vector<std::string>& sets, const std::vector<std::string>& texts) {
  std::vector<Invariant> out;
  for (const auto& s : sets) {
    std::string name = s.rfind("builtin:", 0) == 0 ? s.substr(8) : s;
    std::vector<Invariant> b;
    try {
      b = builtin_basis(builtin_from_name(name));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    out.insert(out.end(), b.begin(), b.end());
  }
  for (const auto& t : texts) {
    try {
      out.push_back(parse_invariant(t));
    } catch (const InvariantParseError& e) {
      throw ConfigError(e.what());
    }
  }
  if (out.empty()) throw ConfigError("no invariants given (--set or --invariant)");
  return out;
}

std::vector<int> parse_case(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      int d = std::stoi(item, &used);
      if (used != item.size() || d < 0) throw std::invalid_argument(item);
      out.push_back(d);
    } catch (const std::exception&) {
      throw ConfigError("bad case entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty case");
  return out;
}

expr::Expr parse_field(const std::string& text, const std::string& what) {
  try {
    return expr::parse_expr(text);
  } catch (const std::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

json to_json_number(const BigInt& v) {
  if (v <= BigInt(std::numeric_limits<std::int64_t>::max())) return static_cast<std::int64_t>(v);
  return v.str();
}

json rank_json(const RankReport& r) { return r.to_json(); }

// ------------------------------------------------------------ subcommands

json run_count(int n, int p) {
  if (n < 2 || p < 0) throw ConfigError("count needs n >= 2 and p >= 0");
  auto b = count_breakdown(n, p);
  return {{"n", n},
          {"p", p},
          {"N", to_json_number(b.total)},
          {"terms", {{"first", to_json_number(b.first)}, {"second", to_json_number(b.second)}, {"third", to_json_number(b.third)}}},
          {"special_case", b.special}};
}

json run_enumerate(const Common& c, const std::string& case_text, const std::string& metric, const std::string& point) {
  auto orders = parse_case(case_text);
  for (int d : orders)
    if (d > c.tol.derivative_cap) throw ConfigError("derivative order exceeds derivative_cap");
  RankOptions ro;
  ro.rel_tol = c.tol.svd_rel_tol;
  ro.threads = threads_from_env();
  auto res = count_case(orders, c.seed, ro);
  json j = res.to_json();
  auto schemes = enumerate_schemes(orders);
  std::vector<std::string> names;
  for (const auto& s : schemes) names.push_back(s.to_string());
  j["schemes"] = names;
  if (!metric.empty()) {
    auto g = load_metric(metric, c.seed);
    auto p = parse_point(point, g);
    std::vector<double> vals;
    for (const auto& s : schemes) vals.push_back(evaluate_invariant(s, g, p));
    j["values"] = vals;
  }
  return j;
}

json run_eval(const Common& c, const std::string& metric, const std::string& point, const std::vector<std::string>& sets,
              const std::vector<std::string>& texts) {
  auto g = load_metric(metric, c.seed);
  auto p = parse_point(point, g);
  g.check_at(p);
  auto invs = load_invariants(sets, texts);
  EvalOptions eo;
  eo.derivative_cap = c.tol.derivative_cap;
  json vals = json::array();
  for (const auto& inv : invs) {
    if (inv.max_derivative() > c.tol.derivative_cap) throw ConfigError("invariant exceeds derivative_cap: " + inv.text);
    vals.push_back({{"invariant", inv.text}, {"value", evaluate_invariant(inv, g, p, eo)}});
  }
  return {{"point", point}, {"values", vals}};
}

json run_classify(const Common& c, const std::string& metric, const std::string& point) {
  auto g = load_metric(metric, c.seed);
  auto p = parse_point(point, g);
  g.check_at(p);
  auto s = segre_type(g, p, c.tol.classify_tol);
  json j = s.to_json();
  j["point"] = point;
  return j;
}

json frame_report(const MetricSpec& g, const expr::Point& p, const std::string& canonical, double tol) {
  g.check_at(p);
  auto fp = frame_point(g, p, 1);
  json j;
  auto sc = segre_type(fp.fc, tol);
  j["segre"] = sc.tag;
  if (canonical == "ptype1") {
    auto cf = canonicalize_ptype1(fp, tol);
    j["frame"] = cf.to_json();
    auto np = np_first_order_invariants(cf);
    auto tn = tensor_first_order_invariants(cf.fp.fc);
    const auto& P = cf.psi;
    double ss = 0, s3 = 0;
    {
      Eigen::Matrix3d S = P.trace_free_ricci();
      Eigen::Matrix3d eta = Eigen::Vector3d(cf.fp.frame.eta[0], cf.fp.frame.eta[1], cf.fp.frame.eta[2]).asDiagonal();
      Eigen::Matrix3d M = eta * S;
      ss = (M * M).trace();
      s3 = (M * M * M).trace();
    }
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}); };
    json res;
    res["S_ab S^ab vs 2(3 Psi2^2 + Psi0^2)"] = rel(ss, 2 * (3 * P.psi2 * P.psi2 + P.psi0 * P.psi0));
    res["S_ab S^b_c S^ca vs -6(-Psi2^3 + Psi2 Psi0^2)"] = rel(s3, -6 * (-P.psi2 * P.psi2 * P.psi2 + P.psi2 * P.psi0 * P.psi0));
    const char* labels[] = {"R1", "R2", "R3", "R4"};
    for (int k = 0; k < 4; ++k)
      res[std::string(labels[k]) + " frame vs tensor"] = rel(np[static_cast<std::size_t>(k)], tn[static_cast<std::size_t>(k)]);
    j["first_order_invariants"] = np;
    j["residuals"] = res;
    j["cartan_scalars"] = cartan_scalars(cf);
  } else {
    j["psi"] = psi_components(fp).to_json();
    j["spin"] = spin_coefficients(fp).to_json();
    j["derivatives"] = frame_derivatives(fp).to_json();
  }
  return j;
}

json run_frame(const Common& c, const std::string& metric, const std::string& point, const std::string& points_file,
               const std::string& canonical) {
  if (canonical != "ptype1" && canonical != "none") throw ConfigError("--canonical must be ptype1 or none");
  auto g = load_metric(metric, c.seed);
  if (g.dim != 3) throw DomainError("frames need a 3-dimensional metric");
  std::vector<expr::Point> pts = points_file.empty() ? std::vector<expr::Point>{parse_point(point, g)}
                                                     : load_points(points_file, g);
  json out = json::array();
  for (const auto& p : pts) {
    json pj;
    for (const auto& [k, v] : p.values()) pj[k] = v.to_double();
    json r = frame_report(g, p, canonical, c.tol.classify_tol);
    r["point"] = pj;
    out.push_back(r);
  }
  return {{"canonical", canonical}, {"points", out}};
}

json run_godel(const Common& c, const std::string& H, const std::string& D, double r_min, double r_max) {
  if (!(r_max > r_min)) throw ConfigError("r-max must exceed r-min");
  auto h = parse_field(H, "H");
  auto d = parse_field(D, "D");
  int n = c.tol.samples;
  std::vector<double> rs;
  for (int i = 0; i < n; ++i) rs.push_back(n == 1 ? r_min : r_min + (r_max - r_min) * i / (n - 1));
  auto rep = verify_godel_relations(h, d, rs);
  json j = rep.to_json();
  j["H"] = H;
  j["D"] = D;
  j["pass"] = rep.max_residual < c.tol.residual_tol;
  return j;
}

json run_independence(const Common& c, const std::string& metric, const std::string& point,
                      const std::vector<std::string>& sets, const std::vector<std::string>& texts, const std::string& mode,
                      int num_points, double spread) {
  auto invs = load_invariants(sets, texts);
  auto opt = independence_options(c.tol);
  std::vector<std::string> names;
  for (const auto& inv : invs) names.push_back(inv.text);
  if (mode == "algebraic") {
    int maxd = 0;
    for (const auto& inv : invs) maxd = std::max(maxd, inv.max_derivative());
    if (maxd > c.tol.derivative_cap) throw ConfigError("invariant exceeds derivative_cap");
    auto samples = draw_jet_samples(c.seed, c.tol.samples, maxd + 2);
    auto f = filter_independent(invs, samples, opt);
    json j = f.to_json(names);
    json r = f.rank.to_json();
    j["rank"] = f.rank.rank;
    j["singular_values"] = r["singular_values"];
    j["gap"] = r["gap"];
    j["votes"] = r["votes"];
    j["stable"] = f.rank.stable;
    j["mode"] = mode;
    j["jet_order"] = maxd + 2;
    if (!f.rank.stable) throw Unstable(j);
    return j;
  }
  if (mode == "functional") {
    auto g = load_metric(metric, c.seed);
    auto p = parse_point(point, g);
    auto pts = point_cloud(g, p, num_points, spread, c.seed);
    for (const auto& q : pts) g.check_at(q);
    auto r = functional_rank(invs, g, pts, opt);
    json j = rank_json(r);
    j["mode"] = mode;
    j["invariants"] = names;
    return j;
  }
  throw ConfigError("--mode must be algebraic or functional");
}

json run_cartan_filter(const Common& c, const std::string& family, const std::string& metric, const std::string& point,
                       const std::vector<std::string>& sets, const std::string& H, const std::string& D, int max_q,
                       bool four, int num_points, double spread, int degree) {
  if (max_q < 0) throw ConfigError("max-q must be non-negative");
  FilterOptions fo;
  fo.max_q = max_q;
  fo.four_at_first_level = four;
  fo.rel_tol = c.tol.fd_rel_tol;
  fo.coord_step = c.tol.coord_step;
  fo.constant_tol = c.tol.classify_tol;
  auto opt = independence_options(c.tol);
  json j;
  FilterState st;
  if (family == "godel") {
    auto h = parse_field(H, "H");
    auto d = parse_field(D, "D");
    auto gd = godel_cartan_invariants(h, d);
    std::vector<std::string> names(GodelData::names().begin(), GodelData::names().end());
    auto fam = expression_family(names, gd.list(), {"t", "r", "phi"});
    std::vector<expr::Point> pts;
    double r0 = 0.5;
    if (!point.empty()) r0 = expr::Point::parse(point).at("r").to_double();
    for (int i = 0; i < num_points; ++i) {
      expr::Point p;
      p.set("t", 0.0);
      p.set("r", r0 + spread * i / std::max(1, num_points - 1));
      p.set("phi", 0.0);
      pts.push_back(p);
    }
    st = cartan_filter(fam, pts, polynomial_fit_oracle(fam, pts, degree), fo);
    j["oracle"] = {{"kind", "polynomial_fit"}, {"max_degree", degree}};
    j["H"] = H;
    j["D"] = D;
  } else {
    auto g = load_metric(metric, c.seed);
    auto p = parse_point(point, g);
    auto pts = point_cloud(g, p, num_points, spread, c.seed);
    for (const auto& q : pts) g.check_at(q);
    if (family == "cartan") {
      auto fam = cartan_family(g);
      auto samples = draw_jet_samples(c.seed, c.tol.samples, 3, true);
      st = cartan_filter(fam, pts, jet_rank_oracle(cartan_function(), samples, opt), fo);
      j["oracle"] = {{"kind", "jet_rank"}, {"samples", c.tol.samples}};
    } else if (family == "invariants") {
      auto invs = load_invariants(sets.empty() ? std::vector<std::string>{"zeroth"} : sets, {});
      auto fam = invariant_family(g, invs);
      st = cartan_filter(fam, pts, polynomial_fit_oracle(fam, pts, degree), fo);
      j["oracle"] = {{"kind", "polynomial_fit"}, {"max_degree", degree}};
    } else {
      throw ConfigError("--family must be cartan, invariants or godel");
    }
  }
  j["state"] = st.to_json();
  j["max_q"] = max_q;
  j["four_at_first_level"] = four;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3D Lorentzian curvature invariants and Cartan-Karlhede tools"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  Common c;
  app.add_option("--config", c.config_path, "JSON file with tolerances and seed");
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("-o,--output", c.output, "write the report here instead of stdout");

  auto* count = app.add_subcommand("count", "N(n, p), the number of independent invariants");
  int n = 3, p = 0;
  count->add_option("--n", n, "dimension");
  count->add_option("--p", p, "derivative order")->required();

  auto* bound = app.add_subcommand("bound", "Karlhede bound q = N0 + n + 1");
  int N0 = 0;
  bound->add_option("--N0", N0)->required();
  bound->add_option("--n", n);

  std::string metric, point, points_file, case_text, canonical = "ptype1", mode = "algebraic", family = "cartan";
  std::string H, D;
  std::vector<std::string> sets, texts;
  int samples = 0, max_q = 5, num_points = 6, degree = 3;
  double spread = 0.05, r_min = 0.3, r_max = 2.2, residual_tol = 0;
  bool four = false;

  auto* enumerate = app.add_subcommand("enumerate", "canonical schemes of a case and the number of new invariants");
  enumerate->add_option("--case", case_text, "derivative orders, e.g. 0,1,1")->required();
  enumerate->add_option("--metric", metric, "metric file, 'random' or 'minkowski' (for values)");
  enumerate->add_option("--point", point);

  auto* eval = app.add_subcommand("eval", "evaluate invariants at a point");
  eval->add_option("--metric", metric)->required();
  eval->add_option("--point", point);
  eval->add_option("--set", sets, "builtin:zeroth, builtin:first29, builtin:fkwc_rank0, builtin:components");
  eval->add_option("--invariant", texts, "index notation, e.g. R^{ab}R_{ab}");

  auto* classify = app.add_subcommand("classify", "Segre type of the Ricci operator");
  classify->add_option("--metric", metric)->required();
  classify->add_option("--point", point);

  auto* frame = app.add_subcommand("frame", "null triad, Psi scalars and spin coefficients");
  frame->add_option("--metric", metric)->required();
  frame->add_option("--point", point);
  frame->add_option("--points", points_file, "file with one point per line or a JSON array");
  frame->add_option("--canonical", canonical, "ptype1 or none");

  auto* godel = app.add_subcommand("godel-check", "polynomial relations of the Godel-like family");
  godel->add_option("--H", H)->required();
  godel->add_option("--D", D)->required();
  godel->add_option("--samples", samples, "number of r values");
  godel->add_option("--r-min", r_min);
  godel->add_option("--r-max", r_max);
  godel->add_option("--residual-tol", residual_tol);

  auto* indep = app.add_subcommand("independence", "algebraic or functional rank of a set of invariants");
  indep->add_option("--metric", metric);
  indep->add_option("--point", point);
  indep->add_option("--set", sets);
  indep->add_option("--invariant", texts);
  indep->add_option("--mode", mode, "algebraic or functional");
  indep->add_option("--samples", samples, "jet samples for the majority vote");
  indep->add_option("--num-points", num_points);
  indep->add_option("--spread", spread);

  auto* filter = app.add_subcommand("cartan-filter", "reduce Cartan invariants to an independent set");
  filter->add_option("--family", family, "cartan, invariants or godel");
  filter->add_option("--metric", metric);
  filter->add_option("--point", point);
  filter->add_option("--set", sets);
  filter->add_option("--H", H);
  filter->add_option("--D", D);
  filter->add_option("--max-q", max_q);
  filter->add_flag("--four", four, "ask for four invariants when choosing I^(1)");
  filter->add_option("--num-points", num_points);
  filter->add_option("--spread", spread);
  filter->add_option("--degree", degree, "degree of the polynomial-relation search");
  filter->add_option("--samples", samples);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }

  json report;
  int status = ok;
  auto* sub = app.get_subcommands().front();
  try {
    if (samples > 0) c.overrides["samples"] = samples;
    if (residual_tol > 0) c.overrides["residual_tol"] = residual_tol;
    if (sub == godel && samples == 0) c.overrides["samples"] = 20;
    load_config(c);
    json result;
    if (sub == count) {
      result = run_count(n, p);
    } else if (sub == bound) {
      if (N0 < 0 || n < 2) throw ConfigError("bound needs N0 >= 0 and n >= 2");
      result = {{"N0", N0}, {"n", n}, {"q", karlhede_bound(N0, n)}};
    } else if (sub == enumerate) {
      result = run_enumerate(c, case_text, metric, point);
    } else if (sub == eval) {
      result = run_eval(c, metric, point, sets, texts);
    } else if (sub == classify) {
      result = run_classify(c, metric, point);
    } else if (sub == frame) {
      result = run_frame(c, metric, point, points_file, canonical);
    } else if (sub == godel) {
      result = run_godel(c, H, D, r_min, r_max);
      if (!result["pass"].get<bool>()) status = unstable;
    } else if (sub == indep) {
      result = run_independence(c, metric, point, sets, texts, mode, num_points, spread);
    } else if (sub == filter) {
      result = run_cartan_filter(c, family, metric, point, sets, H, D, max_q, four, num_points, spread, degree);
    }
    report["result"] = result;
  } catch (const Unstable& e) {
    report["result"] = e.report;
    report["error"] = "rank votes disagree across samples";
    status = unstable;
  } catch (const ConfigError& e) {
    report["error"] = e.what();
    status = config_error;
  } catch (const DomainError& e) {
    report["error"] = e.what();
    status = domain_error;
  } catch (const FrameError& e) {
    report["error"] = e.what();
    status = domain_error;
  } catch (const expr::EvalError& e) {
    report["error"] = e.what();
    status = domain_error;
  } catch (const std::domain_error& e) {
    report["error"] = e.what();
    status = domain_error;
  } catch (const std::invalid_argument& e) {
    report["error"] = e.what();
    status = config_error;
  }
  report["tool"] = "curv3d";
  report["version"] = kVersion;
  report["command"] = sub->get_name();
  report["seed"] = c.seed;
  report["tolerances"] = c.tol.to_json();
  json args = json::array();
  for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
  report["arguments"] = args;
  report["exit_status"] = status;

  std::string text = report.dump(2) + "\n";
  if (c.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(c.output);
    if (!out) {
      std::cerr << "cannot write " << c.output << "\n";
      return config_error;
    }
    out << text;
  }
  if (status != ok && report.contains("error")) std::cerr << "error: " << report["error"].get<std::string>() << "\n";
  return status;
}
