#pragma once

// Toric momentum maps on projective space.
//
// A weight system alpha_1..alpha_k in Z^n defines the torus action
// z.[v] = [(e^{-i alpha_j(z)} v_j)_j]. Its momentum map sends [v] to the
// |v_j|^2-weighted mean of the weights, and the orbit through [v] maps onto
// the relative interior of P_v = conv{alpha_j : v_j != 0}.

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <complex>
#include <limits>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "convexkit/errors.hpp"
#include "convexkit/geometry.hpp"
#include "convexkit/laplace.hpp"
#include "convexkit/measure.hpp"
#include "convexkit/numeric.hpp"

namespace ck {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr std::size_t kMaxStratifyWeights = 12;

class TorusWeightSystem {
 public:
  TorusWeightSystem(std::size_t rank, std::vector<std::vector<long long>> weights)
      : rank_(rank), weights_(std::move(weights)) {
    if (rank_ == 0) throw InvalidArgument("weight system: torus rank must be positive");
    if (weights_.empty()) throw InvalidArgument("weight system: no weights");
    for (const auto& w : weights_)
      if (w.size() != rank_) throw DimensionMismatch("weight system: weight length differs from rank");
  }

  std::size_t rank() const { return rank_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<std::vector<long long>>& weights() const { return weights_; }

  RVec weight(std::size_t j) const {
    RVec out;
    for (auto c : weights_.at(j)) out.emplace_back(static_cast<long>(c));
    return out;
  }
  Vec weight_vec(std::size_t j) const {
    Vec out(static_cast<Eigen::Index>(rank_));
    for (std::size_t i = 0; i < rank_; ++i) out[static_cast<Eigen::Index>(i)] = static_cast<double>(weights_[j][i]);
    return out;
  }

 private:
  std::size_t rank_;
  std::vector<std::vector<long long>> weights_;
};

/// Nonzero vector of C^k standing for its complex line.
class ProjectiveVector {
 public:
  explicit ProjectiveVector(std::vector<Complex> amps) : amps_(std::move(amps)) {
    for (std::size_t j = 0; j < amps_.size(); ++j) {
      if (!std::isfinite(amps_[j].real()) || !std::isfinite(amps_[j].imag()))
        throw InvalidArgument("projective vector: non-finite amplitude");
      if (amps_[j] != Complex(0, 0)) support_.push_back(j);
    }
    if (support_.empty()) throw InvalidArgument("projective vector: all amplitudes are zero");
  }

  static ProjectiveVector ones(std::size_t k) { return ProjectiveVector(std::vector<Complex>(k, Complex(1, 0))); }

  std::size_t size() const { return amps_.size(); }
  const std::vector<Complex>& amplitudes() const { return amps_; }
  const std::vector<std::size_t>& support() const { return support_; }

  double norm2() const {
    double s = 0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  CVec as_cvec() const {
    CVec v(static_cast<Eigen::Index>(amps_.size()));
    for (std::size_t j = 0; j < amps_.size(); ++j) v[static_cast<Eigen::Index>(j)] = amps_[j];
    return v;
  }
  static ProjectiveVector from_cvec(const CVec& v) { return ProjectiveVector(std::vector<Complex>(v.data(), v.data() + v.size())); }

  /// Representative divided by its largest-modulus entry.
  std::vector<Complex> normalized() const {
    std::size_t big = 0;
    for (std::size_t j = 1; j < amps_.size(); ++j)
      if (std::abs(amps_[j]) > std::abs(amps_[big])) big = j;
    std::vector<Complex> out(amps_);
    for (auto& a : out) a /= amps_[big];
    return out;
  }

 private:
  std::vector<Complex> amps_;
  std::vector<std::size_t> support_;
};

/// Same complex line up to `tol` after normalizing both by their
/// largest-modulus entry.
inline bool projectively_equal(const ProjectiveVector& a, const ProjectiveVector& b, double tol = 1e-12) {
  if (a.size() != b.size()) return false;
  std::size_t big = 0;
  for (std::size_t j = 1; j < a.size(); ++j)
    if (std::abs(a.amplitudes()[j]) > std::abs(a.amplitudes()[big])) big = j;
  if (b.amplitudes()[big] == Complex(0, 0)) return false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const Complex x = a.amplitudes()[j] / a.amplitudes()[big];
    const Complex y = b.amplitudes()[j] / b.amplitudes()[big];
    if (std::abs(x - y) > tol) return false;
  }
  return true;
}

inline void require_match(const TorusWeightSystem& W, const ProjectiveVector& v) {
  if (W.size() != v.size())
    throw DimensionMismatch("momentum: " + std::to_string(v.size()) + " amplitudes for " +
                            std::to_string(W.size()) + " weights");
}

/// sum_j |v_j|^2 alpha_j / |v|^2
inline Vec momentum(const TorusWeightSystem& W, const ProjectiveVector& v) {
  require_match(W, v);
  Vec m = Vec::Zero(static_cast<Eigen::Index>(W.rank()));
  for (auto j : v.support()) m += std::norm(v.amplitudes()[j]) * W.weight_vec(j);
  return m / v.norm2();
}

/// (x + iy).[v]: component j becomes v_j e^{<alpha_j, y>} e^{-i<alpha_j, x>}.
inline ProjectiveVector orbit_point(const TorusWeightSystem& W, const ProjectiveVector& v, const Vec& x,
                                    const Vec& y) {
  require_match(W, v);
  require_dim(x, W.rank(), "orbit_point");
  require_dim(y, W.rank(), "orbit_point");
  // Common modulus factor keeps the representative in floating range.
  double shift = -std::numeric_limits<double>::infinity();
  for (auto j : v.support()) shift = std::max(shift, W.weight_vec(j).dot(y));
  std::vector<Complex> out(v.size(), Complex(0, 0));
  for (auto j : v.support()) {
    const Vec a = W.weight_vec(j);
    out[j] = v.amplitudes()[j] * std::exp(a.dot(y) - shift) * std::polar(1.0, -a.dot(x));
  }
  return ProjectiveVector(std::move(out));
}

/// P_v = conv{alpha_j : v_j != 0}
inline Polytope moment_polytope(const TorusWeightSystem& W, const ProjectiveVector& v) {
  require_match(W, v);
  std::vector<RVec> pts;
  for (auto j : v.support()) pts.push_back(W.weight(j));
  return hull(pts, W.rank());
}

/// mu_v = sum_j |v_j|^2 delta_{alpha_j}
inline AtomicMeasure orbit_measure(const TorusWeightSystem& W, const ProjectiveVector& v) {
  require_match(W, v);
  std::vector<Atom> atoms;
  for (auto j : v.support()) atoms.push_back({W.weight(j), std::norm(v.amplitudes()[j])});
  return AtomicMeasure(W.rank(), std::move(atoms));
}

struct ReachResult {
  Vec y;
  double residual = 0;
};

/// y with momentum(orbit_point(W, v, 0, y)) = beta, through the moment
/// solver for mu_v at 2y.
inline ReachResult reach_target(const TorusWeightSystem& W, const ProjectiveVector& v, const Vec& beta,
                                const NewtonConfig& cfg = {}) {
  require_dim(beta, W.rank(), "reach_target");
  const AtomicMeasure mu = orbit_measure(W, v);
  const MomentSolution s = solve_moment_any(mu, beta, cfg);
  ReachResult r{s.x / 2.0, 0.0};
  const Vec zero = Vec::Zero(static_cast<Eigen::Index>(W.rank()));
  r.residual = (momentum(W, orbit_point(W, v, zero, r.y)) - beta).norm();
  if (r.residual > cfg.residual_tol)
    throw NonConvergent("reach_target: residual " + std::to_string(r.residual) + " above tolerance");
  return r;
}

struct Stratum {
  FaceDescriptor face;  // indices into the canonical vertices of P_v
  ProjectiveVector representative;
  Vec momentum;
};

/// One stratum per nonempty face of P_v, the whole polytope included. The
/// representative keeps the amplitudes whose weights lie on the face and
/// zeroes the others; its momentum lies in the relative interior of the face.
inline std::vector<Stratum> stratify(const TorusWeightSystem& W, const ProjectiveVector& v, double margin = 1e-9) {
  require_match(W, v);
  if (W.size() > kMaxStratifyWeights)
    throw ResourceGuard("stratify: " + std::to_string(W.size()) + " weights exceeds guard " +
                        std::to_string(kMaxStratifyWeights));
  const Polytope P = moment_polytope(W, v);
  std::vector<FaceDescriptor> all = faces(P);
  std::vector<std::size_t> every(P.size());
  for (std::size_t i = 0; i < every.size(); ++i) every[i] = i;
  all.push_back(FaceDescriptor{every, P.affine_dim()});

  std::vector<Stratum> out;
  for (const auto& f : all) {
    const Polytope F = face_polytope(P, f);
    std::vector<Complex> amps(v.size(), Complex(0, 0));
    for (auto j : v.support())
      if (in_affine_hull(F, W.weight(j))) amps[j] = v.amplitudes()[j];
    ProjectiveVector rep(std::move(amps));
    Vec m = momentum(W, rep);
    if (!relative_interior_contains(F, to_std(m), margin))
      throw Error("stratify: representative momentum escaped the relative interior of its face");
    out.push_back(Stratum{f, std::move(rep), std::move(m)});
  }
  return out;
}

inline void require_skew_adjoint(const CMat& X, double tol = 1e-12) {
  if (X.rows() != X.cols()) throw DimensionMismatch("skew-adjoint check: matrix not square");
  const double r = (X + X.adjoint()).norm();
  if (r > tol * std::max(1.0, X.norm()))
    throw NotSkewAdjoint("matrix is not skew-adjoint: |X + X^*| = " + std::to_string(r));
}

/// i <Xv, v> / <v, v> for skew-adjoint X.
inline double unitary_momentum(const CMat& X, const ProjectiveVector& v) {
  require_skew_adjoint(X);
  if (static_cast<std::size_t>(X.rows()) != v.size()) throw DimensionMismatch("unitary_momentum: size");
  const CVec w = v.as_cvec();
  const Complex val = Complex(0, 1) * w.dot(X * w) / w.squaredNorm();
  if (std::abs(val.imag()) > 1e-12 * std::max(1.0, std::abs(val.real())))
    throw NotSkewAdjoint("unitary_momentum: value has imaginary part " + std::to_string(val.imag()));
  return val.real();
}

/// Central difference of t -> phi(Y)(e^{-tX} v) at 0 minus phi([X, Y])(v).
inline double bracket_check(const CMat& X, const CMat& Y, const ProjectiveVector& v, double h) {
  if (!(h >= 1e-6 && h <= 1e-3)) throw InvalidArgument("bracket_check: step must lie in [1e-6, 1e-3]");
  require_skew_adjoint(X);
  require_skew_adjoint(Y);
  const CVec w = v.as_cvec();
  const CMat fwd = (-h * X).exp();
  const CMat bwd = (h * X).exp();
  const double dphi = (unitary_momentum(Y, ProjectiveVector::from_cvec(fwd * w)) -
                       unitary_momentum(Y, ProjectiveVector::from_cvec(bwd * w))) /
                      (2 * h);
  const CMat bracket = X * Y - Y * X;
  return std::abs(dphi - unitary_momentum(bracket, v));
}

/// (2 / |z|^2)(|u|^2 - |<z/|z|, u>|^2)
inline double fs_quadratic(const CVec& z, const CVec& u) {
  if (z.size() != u.size()) throw DimensionMismatch("fs_quadratic: vector lengths differ");
  const double nz2 = z.squaredNorm();
  if (!(nz2 > 0)) throw InvalidArgument("fs_quadratic: z must be nonzero");
  // |u|^2 - |<z/|z|, u>|^2 is the squared norm of u's component orthogonal to z.
  const CVec residual = u - z * (z.dot(u) / nz2);
  return 2.0 / nz2 * residual.squaredNorm();
}

}  // namespace ck
