#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "convexkit/errors.hpp"
#include "convexkit/geometry.hpp"
#include "convexkit/numeric.hpp"
#include "convexkit/rational.hpp"

namespace ck {

struct Atom {
  RVec alpha;
  double weight = 1.0;
};

/// Finite positive combination of Dirac masses on Q^n, with its support
/// polytope C_mu cached at construction.
class AtomicMeasure {
 public:
  AtomicMeasure(std::size_t dim, std::vector<Atom> atoms) : dim_(dim), atoms_(std::move(atoms)) {
    if (dim_ == 0) throw InvalidArgument("measure: dimension must be positive");
    if (atoms_.empty()) throw InvalidArgument("measure: no atoms");
    std::vector<RVec> pts;
    for (const auto& a : atoms_) {
      if (a.alpha.size() != dim_) throw DimensionMismatch("measure: atom length differs from dimension");
      if (!(a.weight > 0) || !std::isfinite(a.weight))
        throw InvalidArgument("measure: weights must be positive and finite");
      pts.push_back(a.alpha);
    }
    support_ = std::make_shared<const Polytope>(hull(pts, dim_));
    alphas_ = Mat(static_cast<Eigen::Index>(atoms_.size()), static_cast<Eigen::Index>(dim_));
    log_weights_ = Vec(static_cast<Eigen::Index>(atoms_.size()));
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
      alphas_.row(static_cast<Eigen::Index>(j)) = to_vec(atoms_[j].alpha).transpose();
      log_weights_[static_cast<Eigen::Index>(j)] = std::log(atoms_[j].weight);
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }

  /// C_mu, the hull of the support.
  const Polytope& support_polytope() const { return *support_; }
  bool spans() const { return support_->full_dimensional(); }

  /// Atom positions as rows.
  const Mat& alphas() const { return alphas_; }
  const Vec& log_weights() const { return log_weights_; }

 private:
  std::size_t dim_;
  std::vector<Atom> atoms_;
  std::shared_ptr<const Polytope> support_;
  Mat alphas_;
  Vec log_weights_;
};

/// Image of mu under x -> x + shift.
inline AtomicMeasure translate(const AtomicMeasure& mu, const RVec& shift) {
  if (shift.size() != mu.dim()) throw DimensionMismatch("translate: shift length");
  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms()) atoms.push_back({a.alpha + shift, a.weight});
  return AtomicMeasure(mu.dim(), std::move(atoms));
}

/// Gibbs reweighting of mu at x: log-sum-exp of the exponents
/// log w_j + s<alpha_j, x> together with normalized probabilities.
struct GibbsState {
  double log_sum = 0;
  Vec probabilities;
};

inline GibbsState gibbs(const AtomicMeasure& mu, const Vec& x, double s = 1.0) {
  require_dim(x, mu.dim(), "gibbs");
  Vec e = mu.log_weights() + s * (mu.alphas() * x);
  const double m = e.maxCoeff();
  Vec p = (e.array() - m).exp().matrix();
  const double total = p.sum();
  return {m + std::log(total), p / total};
}

inline Vec gibbs_mean(const AtomicMeasure& mu, const GibbsState& g) {
  return mu.alphas().transpose() * g.probabilities;
}

inline Mat gibbs_covariance(const AtomicMeasure& mu, const GibbsState& g) {
  const Vec mean = gibbs_mean(mu, g);
  Mat centred = mu.alphas().rowwise() - mean.transpose();
  Mat cov = centred.transpose() * g.probabilities.asDiagonal() * centred;
  return 0.5 * (cov + cov.transpose());
}

}  // namespace ck
