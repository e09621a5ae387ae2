#pragma once

// Smooth convex potentials, Fenchel conjugation by damped Newton ascent, and
// sampled Legendre diagnostics.

#include <Eigen/Cholesky>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "convexkit/errors.hpp"
#include "convexkit/geometry.hpp"
#include "convexkit/measure.hpp"
#include "convexkit/numeric.hpp"

namespace ck {

/// Anything with a value, a gradient and a Hessian on R^n.
template <class F>
concept SmoothPotential = requires(const F& f, const Vec& x) {
  { f.dim() } -> std::convertible_to<std::size_t>;
  { f.value(x) } -> std::convertible_to<double>;
  { f.gradient(x) } -> std::convertible_to<Vec>;
  { f.hessian(x) } -> std::convertible_to<Mat>;
};

/// f(x) = 1/2 x^T A x + b^T x with A symmetric positive definite.
struct PDQuadratic {
  RMat A;
  RVec b;
  Mat a;
  Vec lin;
};

/// f(y) = (1/s) log sum_j w_j exp(s <alpha_j, y>).
struct LogSumExp {
  AtomicMeasure measure;
  double scale = 1.0;
};

class ConvexPotential;

/// Pointwise sum_i c_i f_i with c_i >= 0.
struct NonNegCombination {
  std::vector<double> coefficients;
  std::vector<ConvexPotential> terms;
};

class ConvexPotential {
 public:
  using Family = std::variant<PDQuadratic, LogSumExp, NonNegCombination>;

  static ConvexPotential quadratic(RMat A, RVec b) {
    const std::size_t n = A.size();
    if (n == 0) throw InvalidArgument("quadratic: empty matrix");
    if (b.size() != n) throw DimensionMismatch("quadratic: b length");
    PDQuadratic q{std::move(A), std::move(b), Mat(n, n), Vec(n)};
    for (std::size_t i = 0; i < n; ++i) {
      if (q.A[i].size() != n) throw DimensionMismatch("quadratic: matrix not square");
      for (std::size_t j = 0; j < n; ++j) {
        if (q.A[i][j] != q.A[j][i]) throw InvalidArgument("quadratic: matrix not symmetric");
        q.a(i, j) = q.A[i][j].get_d();
      }
      q.lin[i] = q.b[i].get_d();
    }
    // Exact positive definiteness via leading principal minors.
    for (std::size_t m = 1; m <= n; ++m) {
      RMat minor(m, RVec(m));
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) minor[i][j] = q.A[i][j];
      if (sgn(determinant(minor)) <= 0) throw InvalidArgument("quadratic: matrix not positive definite");
    }
    return ConvexPotential(n, std::move(q));
  }

  static ConvexPotential identity_quadratic(std::size_t n) {
    RMat A(n, RVec(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) A[i][i] = 1;
    return quadratic(std::move(A), RVec(n, Rational(0)));
  }

  static ConvexPotential log_sum_exp(AtomicMeasure mu, double s = 1.0) {
    if (!(s > 0) || !std::isfinite(s)) throw InvalidArgument("log_sum_exp: scale must be positive");
    const std::size_t n = mu.dim();
    return ConvexPotential(n, LogSumExp{std::move(mu), s});
  }

  static ConvexPotential combination(std::vector<double> coefficients, std::vector<ConvexPotential> terms) {
    if (terms.empty() || coefficients.size() != terms.size())
      throw InvalidArgument("combination: need one coefficient per term");
    const std::size_t n = terms.front().dim();
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (terms[i].dim() != n) throw DimensionMismatch("combination: terms differ in dimension");
      if (!(coefficients[i] >= 0) || !std::isfinite(coefficients[i]))
        throw InvalidArgument("combination: coefficients must be nonnegative");
    }
    return ConvexPotential(n, NonNegCombination{std::move(coefficients), std::move(terms)});
  }

  std::size_t dim() const { return dim_; }
  const Family& family() const { return family_; }

  double value(const Vec& x) const {
    require_dim(x, dim_, "eval");
    return std::visit(
        [&](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, PDQuadratic>) {
            return 0.5 * x.dot(f.a * x) + f.lin.dot(x);
          } else if constexpr (std::is_same_v<T, LogSumExp>) {
            return gibbs(f.measure, x, f.scale).log_sum / f.scale;
          } else {
            double s = 0;
            for (std::size_t i = 0; i < f.terms.size(); ++i)
              if (f.coefficients[i] != 0) s += f.coefficients[i] * f.terms[i].value(x);
            return s;
          }
        },
        family_);
  }

  Vec gradient(const Vec& x) const {
    require_dim(x, dim_, "grad");
    return std::visit(
        [&](const auto& f) -> Vec {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, PDQuadratic>) {
            return f.a * x + f.lin;
          } else if constexpr (std::is_same_v<T, LogSumExp>) {
            return gibbs_mean(f.measure, gibbs(f.measure, x, f.scale));
          } else {
            Vec g = Vec::Zero(static_cast<Eigen::Index>(dim_));
            for (std::size_t i = 0; i < f.terms.size(); ++i)
              if (f.coefficients[i] != 0) g += f.coefficients[i] * f.terms[i].gradient(x);
            return g;
          }
        },
        family_);
  }

  Mat hessian(const Vec& x) const {
    require_dim(x, dim_, "hess");
    return std::visit(
        [&](const auto& f) -> Mat {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, PDQuadratic>) {
            return f.a;
          } else if constexpr (std::is_same_v<T, LogSumExp>) {
            return f.scale * gibbs_covariance(f.measure, gibbs(f.measure, x, f.scale));
          } else {
            const auto n = static_cast<Eigen::Index>(dim_);
            Mat h = Mat::Zero(n, n);
            for (std::size_t i = 0; i < f.terms.size(); ++i)
              if (f.coefficients[i] != 0) h += f.coefficients[i] * f.terms[i].hessian(x);
            return h;
          }
        },
        family_);
  }

  /// True when grad f(R^n) is bounded: log-sum-exp terms only, up to terms
  /// with zero coefficient.
  bool bounded_gradient_image() const {
    return std::visit(
        [&](const auto& f) -> bool {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, PDQuadratic>) {
            return false;
          } else if constexpr (std::is_same_v<T, LogSumExp>) {
            return true;
          } else {
            for (std::size_t i = 0; i < f.terms.size(); ++i)
              if (f.coefficients[i] != 0 && !f.terms[i].bounded_gradient_image()) return false;
            return true;
          }
        },
        family_);
  }

 private:
  ConvexPotential(std::size_t n, Family f) : dim_(n), family_(std::move(f)) {}
  std::size_t dim_;
  Family family_;
};

static_assert(SmoothPotential<ConvexPotential>);

/// Log-sum-exp of the vertices of P with unit weights. Its gradient image is
/// the relative interior of P.
inline ConvexPotential vertex_potential(const Polytope& P, double s = 1.0) {
  std::vector<Atom> atoms;
  for (const auto& v : P.vertices()) atoms.push_back({v, 1.0});
  return ConvexPotential::log_sum_exp(AtomicMeasure(P.dim(), std::move(atoms)), s);
}

template <SmoothPotential F>
double eval(const F& f, const Vec& x) {
  return f.value(x);
}
template <SmoothPotential F>
Vec grad(const F& f, const Vec& x) {
  return f.gradient(x);
}
template <SmoothPotential F>
Mat hess(const F& f, const Vec& x) {
  return f.hessian(x);
}

struct ConjugateResult {
  double value = 0;       // f*(alpha)
  Vec argmax;             // x with grad f(x) = alpha
  double gap_certificate = 0;  // |alpha - grad f(argmax)|
  std::size_t iterations = 0;
};

/// f*(alpha) = sup_x <alpha, x> - f(x) by damped Newton ascent from x0.
template <SmoothPotential F>
ConjugateResult conjugate(const F& f, const Vec& alpha, const Vec& x0, const NewtonConfig& cfg = {}) {
  require_dim(alpha, f.dim(), "conjugate");
  require_dim(x0, f.dim(), "conjugate");
  auto objective = [&](const Vec& z) { return alpha.dot(z) - f.value(z); };
  Vec x = x0;
  double val = objective(x);
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    const Vec g = alpha - f.gradient(x);
    const double gn = g.norm();
    if (gn <= cfg.gradient_tol) return {val, x, gn, it};
    Eigen::LLT<Mat> llt(f.hessian(x));
    if (llt.info() != Eigen::Success) throw SingularHessian("conjugate: Hessian not positive definite");
    const Vec d = llt.solve(g);
    if (!d.allFinite()) throw SingularHessian("conjugate: Newton direction not finite");
    const double slope = g.dot(d);
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60 && !decrement_unresolvable(slope, val); ++ls, t *= cfg.backtrack) {
      const Vec xn = x + t * d;
      const double vn = objective(xn);
      if (std::isfinite(vn) && vn >= val + cfg.armijo * t * slope) {
        x = xn;
        val = vn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Rounding hides the ascent near the optimum; Newton steps are safe there.
      if (gn > 1e-6) throw MaxIterations("conjugate: line search stalled");
      x += d;
      val = objective(x);
    }
    if (x.norm() > cfg.divergence_radius)
      throw Divergence("conjugate: iterates left the divergence radius; target outside the conjugate domain");
  }
  throw MaxIterations("conjugate: iteration limit reached");
}

/// f(x) + f*(alpha) - <alpha, x>.
template <SmoothPotential F>
double fenchel_gap(const F& f, const Vec& x, const Vec& alpha, const NewtonConfig& cfg = {}) {
  const ConjugateResult c = conjugate(f, alpha, x, cfg);
  return f.value(x) + c.value - alpha.dot(x);
}

/// The conjugate f* as a potential in its own right, evaluated on the
/// interior of its domain by solving the inner maximization.
template <SmoothPotential F>
class ConjugatePotential {
 public:
  explicit ConjugatePotential(F f, NewtonConfig cfg = {}) : f_(std::move(f)), cfg_(cfg) {}

  std::size_t dim() const { return f_.dim(); }
  /// +inf where no maximiser is found, so line searches back off. Outside the
  /// domain the ascent either leaves the divergence radius or the Hessian
  /// underflows to singular first.
  double value(const Vec& alpha) const {
    try {
      return solve(alpha).value;
    } catch (const Divergence&) {
      return std::numeric_limits<double>::infinity();
    } catch (const SingularHessian&) {
      return std::numeric_limits<double>::infinity();
    }
  }
  Vec gradient(const Vec& alpha) const { return solve(alpha).argmax; }
  Mat hessian(const Vec& alpha) const {
    // Inverse through the spectrum keeps the result symmetric when h is ill conditioned.
    const Eigen::SelfAdjointEigenSolver<Mat> es(f_.hessian(solve(alpha).argmax));
    if ((es.eigenvalues().array() <= 0).any()) throw SingularHessian("conjugate potential: Hessian of f is singular");
    return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  }

 private:
  ConjugateResult solve(const Vec& alpha) const {
    return conjugate(f_, alpha, Vec::Zero(static_cast<Eigen::Index>(dim())), cfg_);
  }
  F f_;
  NewtonConfig cfg_;
};

/// Tensor grid of probe points over [lo, hi].
struct ProbeBox {
  Vec lo;
  Vec hi;
  std::size_t per_axis = 5;

  std::vector<Vec> points() const {
    const auto n = lo.size();
    if (hi.size() != n) throw DimensionMismatch("probe box: bounds differ in length");
    if (per_axis < 2) throw InvalidArgument("probe box: need at least two points per axis");
    std::vector<Vec> out;
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
      Vec p(n);
      for (Eigen::Index i = 0; i < n; ++i)
        p[i] = lo[i] + (hi[i] - lo[i]) * static_cast<double>(idx[i]) / static_cast<double>(per_axis - 1);
      out.push_back(p);
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == per_axis) idx[k++] = 0;
      if (k == idx.size()) break;
    }
    return out;
  }
};

/// Rationalized hull of the gradients at the probe points: an inner
/// approximation of the closure of grad f(R^n).
template <SmoothPotential F>
Polytope grad_image_hull(const F& f, const ProbeBox& probes, unsigned bits = 40) {
  std::vector<RVec> pts;
  for (const auto& x : probes.points()) pts.push_back(rationalize(f.gradient(x), bits));
  return hull(pts, f.dim());
}

/// Open box; infinite bounds are allowed.
struct DomainBox {
  Vec lo;
  Vec hi;

  static DomainBox whole_space(std::size_t n) {
    const double inf = std::numeric_limits<double>::infinity();
    return {Vec::Constant(static_cast<Eigen::Index>(n), -inf), Vec::Constant(static_cast<Eigen::Index>(n), inf)};
  }
  bool unbounded() const { return lo.array().isInf().all() && hi.array().isInf().all(); }
};

struct LegendreConfig {
  std::size_t steps = 40;
  double threshold = 1e6;
};

struct RayEvidence {
  Vec interior;
  Vec boundary;
  std::vector<double> t;
  std::vector<double> derivative;
  bool monotone = true;
  bool violation = false;
};

struct LegendreReport {
  bool vacuous = false;
  bool legendre = true;
  std::vector<RayEvidence> rays;
};

/// Samples t -> <grad f(x + t(y - x)), y - x> on t = 1 - 2^-m, m = 1..steps.
/// A ray whose last sample stays at or below the threshold is a VIOLATION of
/// the blow-up condition. Evidence is sampled, never a proof.
template <SmoothPotential F>
LegendreReport check_legendre(const F& f, const DomainBox& box, std::vector<Vec> boundary_points,
                              std::vector<Vec> interior_points = {}, const LegendreConfig& cfg = {}) {
  const auto n = static_cast<Eigen::Index>(f.dim());
  if (box.lo.size() != n || box.hi.size() != n) throw DimensionMismatch("check_legendre: box dimension");
  LegendreReport rep;
  Vec centre(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool flo = std::isfinite(box.lo[i]), fhi = std::isfinite(box.hi[i]);
    centre[i] = flo && fhi ? 0.5 * (box.lo[i] + box.hi[i]) : flo ? box.lo[i] + 1 : fhi ? box.hi[i] - 1 : 0.0;
  }
  if (boundary_points.empty()) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::isfinite(box.lo[i])) {
        Vec y = centre;
        y[i] = box.lo[i];
        boundary_points.push_back(y);
      }
      if (std::isfinite(box.hi[i])) {
        Vec y = centre;
        y[i] = box.hi[i];
        boundary_points.push_back(y);
      }
    }
  }
  if (boundary_points.empty()) {
    rep.vacuous = true;
    return rep;
  }
  if (interior_points.empty()) interior_points.push_back(centre);

  for (const auto& x : interior_points) {
    for (const auto& y : boundary_points) {
      RayEvidence ev{x, y, {}, {}, true, false};
      const Vec dir = y - x;
      for (std::size_t m = 1; m <= cfg.steps; ++m) {
        const double t = 1.0 - std::ldexp(1.0, -static_cast<int>(m));
        const double g = f.gradient(x + t * dir).dot(dir);
        if (!ev.derivative.empty() && g < ev.derivative.back()) ev.monotone = false;
        ev.t.push_back(t);
        ev.derivative.push_back(g);
      }
      ev.violation = !(ev.derivative.back() > cfg.threshold);
      if (ev.violation) rep.legendre = false;
      rep.rays.push_back(std::move(ev));
    }
  }
  return rep;
}

}  // namespace ck
