#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "convexkit/errors.hpp"
#include "convexkit/rational.hpp"

namespace ck {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Shared damped-Newton configuration for conjugation and moment inversion.
struct NewtonConfig {
  double gradient_tol = 1e-10;
  double residual_tol = 1e-9;
  double divergence_radius = 1e6;
  std::size_t max_iterations = 200;
  double armijo = 1e-4;
  double backtrack = 0.5;
};

/// True when a Newton decrement is below what the objective can resolve in
/// double precision; the full step is then taken without a line search.
inline bool decrement_unresolvable(double decrement, double value) {
  return std::abs(decrement) <= 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(value));
}

inline Vec to_vec(const RVec& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i].get_d();
  return out;
}

inline Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

inline RVec rationalize(const Vec& v, unsigned bits = 40) {
  RVec out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(rationalize(v[i], bits));
  return out;
}

inline RVec exact_rational(const Vec& v) {
  RVec out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(exact_rational(v[i]));
  return out;
}

inline double min_eigenvalue(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline void require_dim(const Vec& x, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(x.size()) != n) throw DimensionMismatch(std::string(what) + ": dimension mismatch");
  if (!x.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite input");
}

}  // namespace ck
