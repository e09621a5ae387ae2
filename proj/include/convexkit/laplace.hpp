#pragma once

// Laplace transforms of atomic measures and the moment-inversion solver.
//
// For mu = sum_j w_j delta_{alpha_j}, the log-gradient of the Laplace
// transform is the Gibbs mean of the atoms; its image is the relative
// interior of C_mu. solve_moment inverts it by damped Newton on the strictly
// convex map x -> log L(mu)(x) - <beta, x>.

#include <Eigen/Cholesky>

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "convexkit/errors.hpp"
#include "convexkit/geometry.hpp"
#include "convexkit/measure.hpp"
#include "convexkit/numeric.hpp"

namespace ck {

inline double log_laplace(const AtomicMeasure& mu, const Vec& x) { return gibbs(mu, x).log_sum; }

inline double laplace(const AtomicMeasure& mu, const Vec& x) { return std::exp(log_laplace(mu, x)); }

inline Vec grad_log_laplace(const AtomicMeasure& mu, const Vec& x) { return gibbs_mean(mu, gibbs(mu, x)); }

/// Covariance of the Gibbs reweighting of mu at x.
inline Mat hess_log_laplace(const AtomicMeasure& mu, const Vec& x) {
  return gibbs_covariance(mu, gibbs(mu, x));
}

struct MomentSolution {
  Vec x;
  double residual = 0;
  std::size_t iterations = 0;
};

/// x with grad log L(mu)(x) = beta. beta must lie in the relative interior
/// of C_mu, which is checked exactly on the binary value of beta first.
inline MomentSolution solve_moment(const AtomicMeasure& mu, const Vec& beta, const Vec& x0,
                                   const NewtonConfig& cfg = {}) {
  require_dim(beta, mu.dim(), "solve_moment");
  require_dim(x0, mu.dim(), "solve_moment");
  if (!mu.spans())
    throw DegenerateSupport("solve_moment: atoms do not affinely span; quotient the measure first");
  if (!relative_interior_contains(mu.support_polytope(), exact_rational(beta)))
    throw TargetOnBoundaryOrOutside("solve_moment: target is not in the relative interior of the support hull");

  auto objective = [&](const Vec& z) { return log_laplace(mu, z) - beta.dot(z); };
  Vec x = x0;
  double val = objective(x);
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    const GibbsState g = gibbs(mu, x);
    const Vec r = gibbs_mean(mu, g) - beta;
    const double rn = r.norm();
    if (rn <= cfg.gradient_tol) return {x, rn, it};
    Eigen::LLT<Mat> llt(gibbs_covariance(mu, g));
    if (llt.info() != Eigen::Success)
      throw DegenerateSupport("solve_moment: Hessian became singular along the iteration");
    const Vec d = -llt.solve(r);
    if (!d.allFinite()) throw DegenerateSupport("solve_moment: Newton direction not finite");
    const double slope = r.dot(d);
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60 && !decrement_unresolvable(slope, val); ++ls, t *= cfg.backtrack) {
      const Vec xn = x + t * d;
      const double vn = objective(xn);
      if (std::isfinite(vn) && vn <= val + cfg.armijo * t * slope) {
        x = xn;
        val = vn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (rn > 1e-6) throw MaxIterations("solve_moment: line search stalled");
      x += d;
      val = objective(x);
    }
    if (x.norm() > cfg.divergence_radius)
      throw TargetOnBoundaryOrOutside("solve_moment: iterates diverged");
  }
  const double rn = (grad_log_laplace(mu, x) - beta).norm();
  if (rn <= cfg.residual_tol) return {x, rn, cfg.max_iterations};
  throw MaxIterations("solve_moment: iteration limit reached");
}

inline MomentSolution solve_moment(const AtomicMeasure& mu, const Vec& beta, const NewtonConfig& cfg = {}) {
  return solve_moment(mu, beta, Vec::Zero(static_cast<Eigen::Index>(mu.dim())), cfg);
}

/// A measure supported in alpha_0 + H, rewritten in coordinates of H.
///
/// The exact coordinates use the rational echelon basis of H, so lifting
/// them back reproduces every atom exactly. The orthonormal view is a
/// floating-point convenience derived from the same basis.
struct MeasureQuotient {
  RVec base;
  RMat basis;  // rows span H
  std::optional<AtomicMeasure> reduced;  // empty when H = {0}
  double total_weight = 0;
  Mat orthonormal_basis;        // rows, orthonormal, spanning H
  Mat orthonormal_coordinates;  // one row per atom

  std::size_t reduced_dim() const { return basis.size(); }

  /// base + sum_i c_i basis_i
  RVec lift(const RVec& c) const {
    if (c.size() != basis.size()) throw DimensionMismatch("lift: coordinate length");
    RVec out = base;
    for (std::size_t i = 0; i < c.size(); ++i) out = out + c[i] * basis[i];
    return out;
  }

  /// Coordinates of p - base in the rational basis, or nullopt when p is
  /// off the affine hull.
  std::optional<RVec> coordinates(const RVec& p) const {
    EchelonBasis eb(base.size());
    for (const auto& r : basis) eb.insert(r);
    return eb.coordinates(p - base);
  }

  /// Exact orthogonal projection of p onto the affine hull, as coordinates
  /// in the rational basis, together with the squared distance.
  std::pair<RVec, Rational> project(const RVec& p) const {
    const RVec d = p - base;
    const std::size_t k = basis.size();
    RMat gram(k, RVec(k));
    RVec rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
      rhs[i] = dot(basis[i], d);
      for (std::size_t j = 0; j < k; ++j) gram[i][j] = dot(basis[i], basis[j]);
    }
    RVec c = k ? solve_exact(std::move(gram), std::move(rhs)).solution : RVec{};
    RVec off = d;
    for (std::size_t i = 0; i < k; ++i) off = off - c[i] * basis[i];
    return {std::move(c), dot(off, off)};
  }

  /// A dual point x in R^n with <basis_i, x> = xr_i, lying in span(H).
  Vec lift_dual(const Vec& xr) const {
    const auto n = static_cast<Eigen::Index>(base.size());
    if (basis.empty()) return Vec::Zero(n);
    Mat b(static_cast<Eigen::Index>(basis.size()), n);
    for (std::size_t i = 0; i < basis.size(); ++i) b.row(static_cast<Eigen::Index>(i)) = to_vec(basis[i]).transpose();
    return b.transpose() * (b * b.transpose()).ldlt().solve(xr);
  }
};

inline MeasureQuotient quotient_degenerate(const AtomicMeasure& mu) {
  if (mu.spans()) throw FullDimensional("quotient_degenerate: atoms already span the ambient space");
  MeasureQuotient q;
  q.base = mu.atoms().front().alpha;
  EchelonBasis eb(mu.dim());
  for (const auto& a : mu.atoms()) eb.insert(a.alpha - q.base);
  q.basis = eb.rows();
  for (const auto& a : mu.atoms()) q.total_weight += a.weight;
  const std::size_t d = q.basis.size();
  const auto n = static_cast<Eigen::Index>(mu.dim());

  q.orthonormal_basis = Mat(static_cast<Eigen::Index>(d), n);
  for (std::size_t i = 0; i < d; ++i) {
    Vec v = to_vec(q.basis[i]);
    for (std::size_t j = 0; j < i; ++j) {
      const Vec u = q.orthonormal_basis.row(static_cast<Eigen::Index>(j)).transpose();
      v -= u.dot(v) * u;
    }
    q.orthonormal_basis.row(static_cast<Eigen::Index>(i)) = v.normalized().transpose();
  }
  q.orthonormal_coordinates = Mat(static_cast<Eigen::Index>(mu.size()), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const Vec diff = to_vec(mu.atoms()[j].alpha - q.base);
    q.orthonormal_coordinates.row(static_cast<Eigen::Index>(j)) = (q.orthonormal_basis * diff).transpose();
  }

  if (d > 0) {
    std::vector<Atom> atoms;
    for (const auto& a : mu.atoms()) atoms.push_back({*eb.coordinates(a.alpha - q.base), a.weight});
    q.reduced.emplace(d, std::move(atoms));
  }
  return q;
}

/// Solves the moment problem for any support: full-dimensional measures go
/// straight to solve_moment, others through their quotient. The returned x
/// satisfies grad log L(mu)(x) = beta.
inline MomentSolution solve_moment_any(const AtomicMeasure& mu, const Vec& beta, const NewtonConfig& cfg = {}) {
  require_dim(beta, mu.dim(), "solve_moment");
  if (mu.spans()) return solve_moment(mu, beta, cfg);
  const MeasureQuotient q = quotient_degenerate(mu);
  // Binary targets rarely sit exactly on a rational flat; distances within
  // the residual tolerance count as on it.
  const auto [coords, dist2] = q.project(exact_rational(beta));
  const double slack = cfg.residual_tol * std::max(1.0, beta.norm());
  if (dist2.get_d() > slack * slack)
    throw TargetOnBoundaryOrOutside("solve_moment: target is off the affine hull of the support");
  const auto n = static_cast<Eigen::Index>(mu.dim());
  if (!q.reduced) return {Vec::Zero(n), (to_vec(q.base) - beta).norm(), 0};
  MomentSolution r = solve_moment(*q.reduced, to_vec(coords), cfg);
  Vec x = q.lift_dual(r.x);
  return {x, (grad_log_laplace(mu, x) - beta).norm(), r.iterations};
}

/// Grid discretization of the Gaussian density restricted to P: atoms at the
/// cell centres lying in P, weights exp(-|y|^2) times the cell volume.
inline AtomicMeasure gaussian_polytope_measure(const Polytope& P, std::size_t resolution) {
  if (!P.full_dimensional()) throw DegeneratePolytope("gaussian_polytope_measure: polytope is not full-dimensional");
  if (resolution == 0) throw InvalidArgument("gaussian_polytope_measure: resolution must be positive");
  const std::size_t n = P.dim();
  RVec lo = P.vertices().front(), hi = P.vertices().front();
  for (const auto& v : P.vertices())
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] < lo[i]) lo[i] = v[i];
      if (v[i] > hi[i]) hi[i] = v[i];
    }
  RVec width(n);
  Rational cell = 1;
  for (std::size_t i = 0; i < n; ++i) {
    width[i] = (hi[i] - lo[i]) / Rational(static_cast<unsigned long>(resolution));
    cell *= width[i];
  }
  const double cell_volume = cell.get_d();

  std::vector<Atom> atoms;
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    RVec y(n);
    for (std::size_t i = 0; i < n; ++i)
      y[i] = lo[i] + (Rational(static_cast<unsigned long>(idx[i])) + Rational(1, 2)) * width[i];
    bool inside = true;
    for (const auto& h : P.facets())
      if (dot(h.normal, y) > h.offset) {
        inside = false;
        break;
      }
    if (inside) {
      const double r2 = to_vec(y).squaredNorm();
      atoms.push_back({y, std::exp(-r2) * cell_volume});
    }
    std::size_t k = 0;
    while (k < n && ++idx[k] == resolution) idx[k++] = 0;
    if (k == n) break;
  }
  if (atoms.empty()) throw DegeneratePolytope("gaussian_polytope_measure: grid too coarse, no cell centre in P");
  return AtomicMeasure(n, std::move(atoms));
}

}  // namespace ck
