#include "curv3d/classify.hpp"

#include <algorithm>
#include <cmath>

namespace curv3d {

namespace {

using Mat3 = Eigen::Matrix3d;

struct Core {
  std::string tag;
  std::optional<double> lambda1;
  nlohmann::json margins;
};

Core classify_core(const Mat3& A, const std::array<double, 3>& eta, double tol) {
  double R = A.trace();
  Mat3 S = A - (R / 3) * Mat3::Identity();
  double normS = S.norm();
  double p = -0.5 * (S * S).trace();
  double q = -(S * S * S).trace() / 3;
  // Discriminant sign of x^3 + p x + q, relative to its natural scale.
  double num = 4 * p * p * p + 27 * q * q;
  double den = 4 * std::abs(p * p * p) + 27 * q * q;
  double rel_disc = den > 0 ? num / den : 0.0;
  double rank_tol = std::sqrt(tol);
  Core c;
  c.margins["relative_discriminant"] = rel_disc;
  c.margins["tolerance"] = tol;
  if (normS <= rank_tol * A.norm()) {
    c.tag = "{(1,11)}";
    c.lambda1 = R / 3;
    c.margins["trace_free_norm"] = normS;
    return c;
  }
  c.margins["trace_free_norm"] = normS;
  // All three roots near zero relative to |S|: the discriminant is pure rounding.
  bool nilpotent = std::abs(p) <= rank_tol * normS * normS && std::abs(q) <= rank_tol * normS * normS * normS;
  if (nilpotent) {
    c.margins["relative_discriminant"] = 0.0;
  } else if (rel_disc > tol) {
    c.tag = "{1zz̄}";
    return c;
  } else if (rel_disc < -tol) {
    c.tag = "{1,11}";
    return c;
  }
  // Repeated root r (double) with simple root -2r, or a triple root at 0.
  double r = !nilpotent && std::abs(p) > 0 ? -1.5 * q / p : 0.0;
  bool triple = nilpotent || std::abs(r) <= rank_tol * normS;
  if (triple) r = 0;
  c.margins["repeated_root"] = r;
  Eigen::JacobiSVD<Mat3> svd(S - r * Mat3::Identity(), Eigen::ComputeFullV);
  auto sv = svd.singularValues();
  c.margins["singular_values"] = {sv(0), sv(1), sv(2)};
  int rank = 0;
  for (int i = 0; i < 3; ++i)
    if (sv(i) > rank_tol * normS) ++rank;
  c.lambda1 = r + R / 3;
  if (triple) {
    c.tag = rank == 0 ? "{(1,11)}" : rank == 1 ? "{(21)}" : "{3}";
    return c;
  }
  if (rank >= 2) {
    c.tag = "{21}";
    return c;
  }
  // Diagonalizable double root: causal character of the eigenplane.
  Eigen::Vector3d u = svd.matrixV().col(1), v = svd.matrixV().col(2);
  auto dot = [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return eta[0] * a(0) * b(0) + eta[1] * a(1) * b(1) + eta[2] * a(2) * b(2);
  };
  double gram = dot(u, u) * dot(v, v) - dot(u, v) * dot(u, v);
  c.margins["eigenplane_gram"] = gram;
  c.tag = gram > 0 ? "{1,(11)}" : "{(1,1)1}";
  return c;
}

}  // namespace

std::pair<std::string, int> ricci_type_of(const std::string& tag, bool zero) {
  if (tag == "{1,11}" || tag == "{1zz̄}") return {"I", 0};
  if (tag == "{1,(11)}") return {"I", 1};
  if (tag == "{(1,1)1}") return {"D", 1};
  if (tag == "{(1,11)}") return {zero ? "O" : "D", 3};
  if (tag == "{21}") return {"II", 0};
  if (tag == "{(21)}") return {zero ? "N" : "II", 1};
  if (tag == "{3}") return {zero ? "III" : "II", 0};
  throw std::invalid_argument("unknown Segre tag " + tag);
}

nlohmann::json SegreType::to_json() const {
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& z : eigenvalues) ev.push_back({{"re", z.real()}, {"im", z.imag()}});
  nlohmann::json j{{"tag", tag},
                   {"ricci_type", ricci_type},
                   {"isotropy_dim", isotropy_dim},
                   {"R", R},
                   {"degenerate", degenerate},
                   {"eigenvalues", ev},
                   {"candidates", candidates},
                   {"margins", margins}};
  j["lambda1"] = lambda1 ? nlohmann::json(*lambda1) : nlohmann::json(nullptr);
  return j;
}

SegreType classify_operator(const Mat3& A, const std::array<double, 3>& eta, double tol) {
  if (!A.allFinite()) throw std::domain_error("Ricci operator is not finite");
  Core core = classify_core(A, eta, tol);
  SegreType s;
  s.tag = core.tag;
  s.lambda1 = core.lambda1;
  s.margins = core.margins;
  s.R = A.trace();
  double scale = A.norm();
  s.degenerate = s.lambda1 && std::abs(*s.lambda1) <= tol * scale;
  auto [type, iso] = ricci_type_of(s.tag, s.degenerate);
  s.ricci_type = type;
  s.isotropy_dim = iso;
  Eigen::EigenSolver<Mat3> es(A, false);
  for (int k = 0; k < 3; ++k) s.eigenvalues.push_back(es.eigenvalues()(k));
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), [](const auto& a, const auto& b) {
    return std::make_pair(a.real(), a.imag()) < std::make_pair(b.real(), b.imag());
  });
  s.candidates.push_back(s.tag);
  for (double f : {1e-3, 1e3}) {
    std::string alt = classify_core(A, eta, tol * f).tag;
    if (std::find(s.candidates.begin(), s.candidates.end(), alt) == s.candidates.end()) s.candidates.push_back(alt);
  }
  return s;
}

SegreType segre_type(const FrameCurvature<double>& fc, double tol) {
  Mat3 A;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) A(a, b) = fc.eta[static_cast<std::size_t>(a)] * fc.nabla.at(0)({a, b});
  return classify_operator(A, {fc.eta[0], fc.eta[1], fc.eta[2]}, tol);
}

SegreType segre_type(const MetricSpec& g, const expr::Point& p, double tol) {
  if (g.dim != 3) throw DomainError("classification needs a 3-dimensional metric");
  return segre_type(frame_values(g, p, 0), tol);
}

}  // namespace curv3d
