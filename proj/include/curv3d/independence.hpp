#pragma once

// Functional and algebraic independence by Jacobian rank, greedy filtering,
// and the level-by-level reduction of Cartan invariants to an independent set.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "curv3d/curvature.hpp"
#include "curv3d/invariants.hpp"
#include "json.hpp"

namespace curv3d {

struct IndependenceOptions {
  double exact_rel_tol = 1e-8;  // SVD threshold for exact gradients
  double fd_rel_tol = 1e-6;     // SVD threshold for finite-difference Jacobians
  double jet_step = 1e-5;       // central difference step in jet coefficients (times max(1, |c|))
  double coord_step = 1e-3;     // five-point stencil step in coordinates
  int threads = 1;
};

struct RankReport {
  int rank = 0;
  std::vector<double> singular_values;  // of the deciding Jacobian, rows normalized
  double gap = 0;                       // sigma_rank / sigma_(rank+1), or infinity
  std::vector<int> votes;               // per point or sample
  bool stable = true;                   // a strict majority agreed
  nlohmann::json to_json() const;
};

/// Rank of J after normalizing its rows, threshold rel_tol * sigma_max.
RankReport matrix_rank(const Eigen::MatrixXd& J, double rel_tol);

using PointFunction = std::function<std::vector<double>(const expr::Point&)>;
using SampleFunction = std::function<std::vector<double>(const JetSample&)>;

/// Max over points of rank d I_i / d x^mu, exact gradients from metric jets.
RankReport functional_rank(const std::vector<Invariant>& invariants, const MetricSpec& g,
                           const std::vector<expr::Point>& points, const IndependenceOptions& opt = {});
/// Same for explicit expressions in the coordinates.
RankReport functional_rank(const std::vector<expr::Expr>& fields, const std::vector<std::string>& coords,
                           const std::vector<expr::Point>& points, const expr::FunctionTable* functions = nullptr,
                           const IndependenceOptions& opt = {});
/// Same for arbitrary scalar fields, by a five-point stencil.
RankReport functional_rank(const PointFunction& f, const std::vector<std::string>& coords,
                           const std::vector<expr::Point>& points, const IndependenceOptions& opt = {});
/// Coordinate Jacobian of f at p (rows: outputs).
Eigen::MatrixXd coordinate_jacobian(const PointFunction& f, const std::vector<std::string>& coords, const expr::Point& p,
                                    double step);

/// Jacobian of f with respect to the jet coefficients of s, central differences.
Eigen::MatrixXd jet_jacobian(const SampleFunction& f, const JetSample& s, double step);

/// Majority rank of d I_i / d c_j over the samples.
RankReport algebraic_rank(const SampleFunction& f, const std::vector<JetSample>& samples,
                          const IndependenceOptions& opt = {});
RankReport algebraic_rank(const std::vector<Invariant>& invariants, const std::vector<JetSample>& samples,
                          const IndependenceOptions& opt = {});
/// Majority of rank(rows) over precomputed Jacobians.
RankReport algebraic_rank(const std::vector<Eigen::MatrixXd>& jacobians, const std::vector<int>& rows, double rel_tol);

/// Values of the invariants at the origin of a jet sample.
SampleFunction invariant_function(const std::vector<Invariant>& invariants);
/// The 21 canonical-frame scalars of a P-type I jet sample.
SampleFunction cartan_function();

/// Jet samples of the given order; with ptype1_only, only those with three distinct real eigenvalues.
std::vector<JetSample> draw_jet_samples(std::uint64_t seed, int count, int order, bool ptype1_only = false,
                                        double min_gap = 1e-3);

struct FilterResult {
  std::vector<int> kept, dropped;
  RankReport rank;
  nlohmann::json to_json(const std::vector<std::string>& names = {}) const;
};

/// Greedy scan in input order, keeping members that raise the algebraic rank.
FilterResult filter_independent(const SampleFunction& f, const std::vector<JetSample>& samples,
                                const IndependenceOptions& opt = {});
FilterResult filter_independent(const std::vector<Invariant>& invariants, const std::vector<JetSample>& samples,
                                const IndependenceOptions& opt = {});

// ------------------------------------------------------------ Cartan filter

/// Named scalar fields on a chart.
struct ScalarFamily {
  std::vector<std::string> names;
  std::vector<std::string> coords;
  PointFunction eval;
};

/// The 21 canonical-frame scalars of a P-type I metric.
ScalarFamily cartan_family(const MetricSpec& g);
/// Polynomial invariants of g as fields.
ScalarFamily invariant_family(const MetricSpec& g, const std::vector<Invariant>& invariants);
ScalarFamily expression_family(const std::vector<std::string>& names, const std::vector<expr::Expr>& fields,
                               const std::vector<std::string>& coords, const expr::FunctionTable* functions = nullptr);

/// True when member `candidate` is algebraically dependent on the members in `basis`.
using DependenceOracle = std::function<bool(const std::vector<int>& basis, int candidate)>;

/// Looks for a polynomial relation of degree <= max_degree in the values of
/// (basis, candidate) over the points; the degree drops until the fit is overdetermined.
DependenceOracle polynomial_fit_oracle(const ScalarFamily& family, const std::vector<expr::Point>& points,
                                       int max_degree = 3, double rel_tol = 1e-10);
/// Compares Jacobian ranks in the jet coefficients, majority over samples.
DependenceOracle jet_rank_oracle(const SampleFunction& f, const std::vector<JetSample>& samples,
                                 const IndependenceOptions& opt = {});

struct FilterOptions {
  int max_q = 5;
  bool four_at_first_level = false;  // ask for four independent invariants when choosing I^(1)
  double rel_tol = 1e-6;
  double coord_step = 1e-3;
  double constant_tol = 1e-9;
};

struct FilterLevel {
  int q = 0;
  std::vector<int> chosen;         // I^(q)
  std::vector<int> dependent;      // removed as algebraically dependent
  std::vector<int> residual;       // F_q
};

struct FilterState {
  std::vector<std::string> names;
  int q = 0;                       // q0, the level where the residual set became small
  std::vector<FilterLevel> levels;
  std::vector<int> f_tilde;
  std::vector<int> f_omega;
  std::vector<int> constants;
  int functional_rank = 0;
  bool terminated = false;
  nlohmann::json to_json() const;
};

FilterState cartan_filter(const ScalarFamily& family, const std::vector<expr::Point>& points,
                          const DependenceOracle& dependent, const FilterOptions& opt = {});

}  // namespace curv3d
