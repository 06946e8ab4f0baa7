#pragma once

// Segre type of the trace-free Ricci operator at a point, with the Ricci type
// and isotropy dimension it implies.

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "curv3d/curvature.hpp"
#include "curv3d/tensor.hpp"
#include "json.hpp"

namespace curv3d {

struct SegreType {
  std::string tag;          // e.g. "{1,11}", "{(21)}", "{1zz̄}"
  std::string ricci_type;   // I, D, O, II, N, III
  int isotropy_dim = 0;     // 0, 1 or 3
  std::optional<double> lambda1;  // Ricci eigenvalue on the degenerate block
  bool degenerate = false;  // lambda1 = 0 where the Ricci type branches on it
  double R = 0;
  std::vector<std::complex<double>> eigenvalues;  // of R^a_b
  std::vector<std::string> candidates;            // more than one when a decision is marginal
  nlohmann::json margins = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// (tag, lambda1 = 0) to (Ricci type, isotropy dimension).
std::pair<std::string, int> ricci_type_of(const std::string& tag, bool lambda1_zero);

/// Classifies R^A_B given in an orthonormal frame with signature eta.
SegreType classify_operator(const Eigen::Matrix3d& ricci_mixed, const std::array<double, 3>& eta = {-1, 1, 1},
                            double tol = 1e-9);
SegreType segre_type(const FrameCurvature<double>& fc, double tol = 1e-9);
SegreType segre_type(const MetricSpec& g, const expr::Point& p, double tol = 1e-9);

}  // namespace curv3d
