#pragma once

// Scalar polynomial curvature invariants built from nabla^d Ric: contraction
// schemes, the index-notation parser, enumeration, evaluation and counting.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "curv3d/curvature.hpp"
#include "curv3d/expr.hpp"
#include "json.hpp"

namespace curv3d {

/// A monomial: factors nabla^{d_i} Ric (d sorted ascending) and a perfect
/// matching of their slots. Factor i owns slots [offset(i), offset(i) + 2 + d_i);
/// the first two are the Ricci slots, then derivative slots in the order applied.
struct ContractionScheme {
  std::vector<int> orders;
  std::vector<int> partner;
  std::vector<bool> upper;  // display only

  int num_factors() const { return static_cast<int>(orders.size()); }
  int num_slots() const { return static_cast<int>(partner.size()); }
  int offset(int factor) const;
  int factor_of(int slot) const;
  int order() const;  // number of metric derivatives, sum of (2 + d_i)
  bool connected() const;
  bool valid() const;
  std::string to_string() const;

  friend bool operator==(const ContractionScheme& a, const ContractionScheme& b) {
    return a.orders == b.orders && a.partner == b.partner;
  }
  friend bool operator<(const ContractionScheme& a, const ContractionScheme& b) {
    if (a.orders != b.orders) return a.orders < b.orders;
    return a.partner < b.partner;
  }
};

/// Lexicographically minimal encoding under permutations of identical factors
/// and swaps of each factor's Ricci pair.
ContractionScheme canonical(const ContractionScheme& s);

/// Canonical representatives of all perfect matchings of the case, sorted.
std::vector<ContractionScheme> enumerate_schemes(std::vector<int> case_orders);
/// Number of raw perfect matchings before reduction.
std::uint64_t count_matchings(const std::vector<int>& case_orders);

struct Term {
  Rational coeff;
  ContractionScheme scheme;
};

/// A linear combination of schemes (Riemann and trace-free heads expand to several terms).
struct Invariant {
  std::string text;
  std::vector<Term> terms;

  int max_derivative() const;
  std::vector<int> case_orders() const;  // of the first term
  static Invariant from_scheme(const ContractionScheme& s);
};

class InvariantParseError : public std::runtime_error {
 public:
  InvariantParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

Invariant parse_invariant(std::string_view text);

template <class S>
S evaluate_scheme(const ContractionScheme& s, const FrameCurvature<S>& fc);
template <class S>
S evaluate(const Invariant& inv, const FrameCurvature<S>& fc);

extern template double evaluate_scheme(const ContractionScheme&, const FrameCurvature<double>&);
extern template Jet evaluate_scheme(const ContractionScheme&, const FrameCurvature<Jet>&);
extern template double evaluate(const Invariant&, const FrameCurvature<double>&);
extern template Jet evaluate(const Invariant&, const FrameCurvature<Jet>&);

struct EvalOptions {
  int derivative_cap = 5;
};

double evaluate_invariant(const Invariant& inv, const MetricSpec& g, const expr::Point& p,
                          const EvalOptions& opt = {});
double evaluate_invariant(const ContractionScheme& s, const MetricSpec& g, const expr::Point& p,
                          const EvalOptions& opt = {});

// ------------------------------------------------------------ counting

struct RankOptions {
  double rel_tol = 1e-8;
  int min_samples = 48;
  int threads = 1;
};

struct CountResult {
  std::vector<int> case_orders;
  int count = 0;
  std::vector<ContractionScheme> representatives;
  std::size_t num_schemes = 0;    // canonical schemes in the case
  std::size_t num_lower = 0;      // rows spanning the lower/product space
  int lower_rank = 0;
  int samples = 0;
  double weakest_kept = 0;        // smallest residual of a kept row
  double strongest_dropped = 0;   // largest residual of a dropped row
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

/// Cases of strictly higher degree with the same total order and no larger
/// derivative order, included in the lower span when some d_i >= 2.
std::vector<std::vector<int>> commutator_cases(const std::vector<int>& case_orders);

/// New invariants of a case, independent of products (disconnected schemes)
/// and of commutator terms.
CountResult count_case(const std::vector<int>& case_orders, std::uint64_t seed, const RankOptions& opt = {});

/// Same count with products of an explicit lower basis in place of disconnected schemes.
CountResult dedup_and_count(const std::vector<int>& case_orders, const std::vector<Invariant>& lower_basis,
                            std::uint64_t seed, const RankOptions& opt = {});

enum class BuiltinBasis { zeroth, first29, fkwc_rank0, components };
std::vector<Invariant> builtin_basis(BuiltinBasis kind);
BuiltinBasis builtin_from_name(const std::string& name);
std::vector<std::string> builtin_texts(BuiltinBasis kind);

}  // namespace curv3d
