#pragma once

// Torus-invariant (1,1)-forms built from convex potentials.
//
// Tangent vectors of C^n / iZ^n are pairs (v, w) of real and imaginary
// parts. The form of a potential f at x is
//     omega((v,w),(v',w')) = v^T H w' - w^T H v',   H = hess f(x),
// and its top power over n! has density det H against dx_1 dy_1 ... dx_n dy_n.
// Integrating over the fibre is trivial, so the volume integral reduces to
// the integral of det H over R^n.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "convexkit/convexfn.hpp"
#include "convexkit/errors.hpp"
#include "convexkit/geometry.hpp"
#include "convexkit/mixedvol.hpp"
#include "convexkit/numeric.hpp"

namespace ck {

inline constexpr std::size_t kMaxPfaffianDim = 4;

/// A point of the tangent space: real part v, imaginary part w.
struct Tangent {
  Vec v;
  Vec w;
};

/// J(v, w) = (-w, v).
inline Tangent apply_j(const Tangent& u) { return {-u.w, u.v}; }

template <SmoothPotential F = ConvexPotential>
class TorusFormField {
 public:
  explicit TorusFormField(F potential) : f_(std::move(potential)) {}

  std::size_t dim() const { return f_.dim(); }
  const F& potential() const { return f_; }
  Mat hessian(const Vec& x) const { return f_.hessian(x); }

 private:
  F f_;
};

namespace detail {

inline void require_tangent(const Tangent& u, std::size_t n, const char* what) {
  require_dim(u.v, n, what);
  require_dim(u.w, n, what);
}

}  // namespace detail

template <SmoothPotential F>
double form_value(const TorusFormField<F>& field, const Vec& x, const Tangent& a, const Tangent& b) {
  require_dim(x, field.dim(), "form_value");
  detail::require_tangent(a, field.dim(), "form_value");
  detail::require_tangent(b, field.dim(), "form_value");
  const Mat h = field.hessian(x);
  return a.v.dot(h * b.w) - a.w.dot(h * b.v);
}

/// omega(u, J u) = v^T H v + w^T H w.
template <SmoothPotential F>
double positivity_probe(const TorusFormField<F>& field, const Vec& x, const Tangent& u) {
  require_dim(x, field.dim(), "positivity_probe");
  detail::require_tangent(u, field.dim(), "positivity_probe");
  const Mat h = field.hessian(x);
  return u.v.dot(h * u.v) + u.w.dot(h * u.w);
}

/// Antisymmetric 2n x 2n matrix of the form in the basis
/// (x_1, y_1, ..., x_n, y_n).
inline Mat form_matrix(const Mat& h) {
  const Eigen::Index n = h.rows();
  Mat omega = Mat::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      omega(2 * j, 2 * k + 1) = h(j, k);
      omega(2 * k + 1, 2 * j) = -h(j, k);
    }
  return omega;
}

/// Pf(A) = 1/(2^n n!) sum_sigma sgn(sigma) prod_i A(sigma(2i), sigma(2i+1)),
/// summed over all permutations of the 2n indices.
inline double pfaffian_by_permutations(const Mat& a) {
  const auto m = static_cast<std::size_t>(a.rows());
  if (m % 2 != 0 || a.cols() != a.rows()) throw InvalidArgument("pfaffian: need an even square matrix");
  if (m / 2 > kMaxPfaffianDim)
    throw ResourceGuard("pfaffian: dimension " + std::to_string(m / 2) + " exceeds guard " +
                        std::to_string(kMaxPfaffianDim));
  std::vector<std::size_t> p(m);
  std::iota(p.begin(), p.end(), 0);
  double sum = 0;
  do {
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) inversions += p[i] > p[j];
    double term = inversions % 2 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < m && term != 0; i += 2)
      term *= a(static_cast<Eigen::Index>(p[i]), static_cast<Eigen::Index>(p[i + 1]));
    sum += term;
  } while (std::next_permutation(p.begin(), p.end()));
  double norm = 1;
  for (std::size_t i = 1; i <= m / 2; ++i) norm *= 2.0 * static_cast<double>(i);
  return sum / norm;
}

/// Coefficient of omega^n / n! on dx_1 dy_1 ... dx_n dy_n.
template <SmoothPotential F>
double top_power_density(const TorusFormField<F>& field, const Vec& x) {
  require_dim(x, field.dim(), "top_power_density");
  if (field.dim() > kMaxPfaffianDim)
    throw ResourceGuard("top_power_density: dimension " + std::to_string(field.dim()) + " exceeds guard " +
                        std::to_string(kMaxPfaffianDim));
  return pfaffian_by_permutations(form_matrix(field.hessian(x)));
}

struct QuadratureConfig {
  unsigned order = 20;         // Gauss-Legendre nodes per axis per panel
  std::size_t panels = 4;      // per axis at the starting radius
  double radius = 8;           // starting half-width of the box
  bool adaptive = true;
  double rel_tol = 1e-4;
  std::size_t max_doublings = 5;
  std::size_t workers = 1;
  std::size_t max_nodes = 50'000'000;
};

struct QuadratureStep {
  double radius;
  std::size_t panels;
  double value;
  double increment;  // |value - previous value|, 0 for the first step
};

struct QuadratureReport {
  double value = 0;
  double radius = 0;
  unsigned order = 0;
  std::size_t panels = 0;  // per axis at the final radius
  std::vector<QuadratureStep> history;
};

namespace detail {

template <unsigned N>
void gauss_nodes(std::vector<double>& x, std::vector<double>& w) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& ax = G::abscissa();
  const auto& wt = G::weights();
  for (std::size_t i = 0; i < ax.size(); ++i) {
    if (ax[i] == 0) {
      x.push_back(0);
      w.push_back(wt[i]);
    } else {
      x.push_back(-ax[i]);
      w.push_back(wt[i]);
      x.push_back(ax[i]);
      w.push_back(wt[i]);
    }
  }
}

// Nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_rule(unsigned order) {
  std::vector<double> x, w;
  switch (order) {
    case 7: gauss_nodes<7>(x, w); break;
    case 10: gauss_nodes<10>(x, w); break;
    case 15: gauss_nodes<15>(x, w); break;
    case 20: gauss_nodes<20>(x, w); break;
    case 25: gauss_nodes<25>(x, w); break;
    case 30: gauss_nodes<30>(x, w); break;
    default: throw InvalidArgument("quadrature: order must be one of 7, 10, 15, 20, 25, 30");
  }
  return {x, w};
}

// Tensor Gauss-Legendre rule on [-r, r]^n split into `panels` per axis.
// Panels are summed in a fixed order regardless of the worker count.
template <class Density>
double tensor_quadrature(const Density& density, std::size_t n, double r, std::size_t panels, unsigned order,
                         std::size_t workers, std::size_t max_nodes) {
  const auto [gx, gw] = gauss_rule(order);
  double total_nodes = 1;
  for (std::size_t i = 0; i < n; ++i) total_nodes *= static_cast<double>(panels * gx.size());
  if (total_nodes > static_cast<double>(max_nodes))
    throw ResourceGuard("quadrature: " + std::to_string(static_cast<long long>(total_nodes)) +
                        " nodes exceeds guard " + std::to_string(max_nodes));

  // Nodes along one axis, flattened over panels.
  const double width = 2 * r / static_cast<double>(panels);
  std::vector<double> ax, aw;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = -r + (static_cast<double>(p) + 0.5) * width;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      ax.push_back(mid + 0.5 * width * gx[i]);
      aw.push_back(0.5 * width * gw[i]);
    }
  }

  std::size_t cells = 1;
  for (std::size_t i = 0; i < n; ++i) cells *= panels;
  const std::size_t per_panel = gx.size();

  auto panel_sum = [&](std::size_t cell) {
    std::vector<std::size_t> pidx(n);
    for (std::size_t i = 0, c = cell; i < n; ++i, c /= panels) pidx[i] = c % panels;
    std::vector<std::size_t> idx(n, 0);
    Vec x(static_cast<Eigen::Index>(n));
    double s = 0;
    for (;;) {
      double weight = 1;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = pidx[i] * per_panel + idx[i];
        x[static_cast<Eigen::Index>(i)] = ax[a];
        weight *= aw[a];
      }
      s += weight * density(x);
      std::size_t k = 0;
      while (k < n && ++idx[k] == per_panel) idx[k++] = 0;
      if (k == n) break;
    }
    return s;
  };

  std::vector<double> sums(cells, 0.0);
  workers = std::max<std::size_t>(1, std::min(workers, cells));
  if (workers == 1) {
    for (std::size_t c = 0; c < cells; ++c) sums[c] = panel_sum(c);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t c = w; c < cells; c += workers) sums[c] = panel_sum(c);
      }));
    for (auto& j : jobs) j.get();
  }
  return std::accumulate(sums.begin(), sums.end(), 0.0);
}

}  // namespace detail

/// Integral of det hess f over R^n, approximated on growing boxes. Each
/// doubling of the radius doubles the panel count so the panel width stays
/// fixed. Only potentials with bounded gradient image are accepted; for
/// those the integral is the volume of the gradient image.
inline QuadratureReport integrate_det_hess(const ConvexPotential& f, const QuadratureConfig& cfg = {}) {
  if (!f.bounded_gradient_image())
    throw UnboundedGradientImage("integrate_det_hess: gradient image of the potential is unbounded");
  if (!(cfg.radius > 0) || cfg.panels == 0) throw InvalidArgument("integrate_det_hess: radius and panels must be positive");
  const std::size_t n = f.dim();
  auto density = [&f](const Vec& x) { return f.hessian(x).determinant(); };

  QuadratureReport rep;
  rep.order = cfg.order;
  double r = cfg.radius;
  std::size_t panels = cfg.panels;
  double prev = detail::tensor_quadrature(density, n, r, panels, cfg.order, cfg.workers, cfg.max_nodes);
  rep.history.push_back({r, panels, prev, 0.0});
  rep.value = prev;
  rep.radius = r;
  rep.panels = panels;
  if (!cfg.adaptive) return rep;

  for (std::size_t d = 0; d < cfg.max_doublings; ++d) {
    r *= 2;
    panels *= 2;
    const double cur = detail::tensor_quadrature(density, n, r, panels, cfg.order, cfg.workers, cfg.max_nodes);
    const double inc = std::abs(cur - prev);
    rep.history.push_back({r, panels, cur, inc});
    rep.value = cur;
    rep.radius = r;
    rep.panels = panels;
    if (inc <= cfg.rel_tol * std::abs(cur)) return rep;
    prev = cur;
  }
  throw NonConvergent("integrate_det_hess: radius cap reached without meeting the increment tolerance");
}

/// Closure of grad f(R^n) as an exact polytope. Combination coefficients
/// enter through their exact binary values.
inline Polytope gradient_image(const ConvexPotential& f) {
  return std::visit(
      [&](const auto& fam) -> Polytope {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, PDQuadratic>) {
          throw UnboundedGradientImage("gradient_image: quadratic potentials have unbounded gradient image");
        } else if constexpr (std::is_same_v<T, LogSumExp>) {
          return fam.measure.support_polytope();
        } else {
          Polytope sum = point_polytope(RVec(f.dim(), Rational(0)));
          for (std::size_t i = 0; i < fam.terms.size(); ++i)
            if (fam.coefficients[i] != 0)
              sum = minkowski_sum(sum, scale(gradient_image(fam.terms[i]), exact_rational(fam.coefficients[i])));
          return sum;
        }
      },
      f.family());
}

struct BridgeComparison {
  double quadrature = 0;
  double exact = 0;
  double rel_error = 0;
  QuadratureReport report;
};

inline BridgeComparison compare_to_volume(const ConvexPotential& f, const Rational& exact,
                                          const QuadratureConfig& cfg) {
  BridgeComparison c;
  c.report = integrate_det_hess(f, cfg);
  c.quadrature = c.report.value;
  c.exact = exact.get_d();
  c.rel_error = std::abs(c.quadrature - c.exact) / std::abs(c.exact);
  return c;
}

/// The sum of vertex potentials of P and Q against vol(P + Q).
inline BridgeComparison additivity_bridge(const Polytope& P, const Polytope& Q, double s = 2.0,
                                          const QuadratureConfig& cfg = {}) {
  const ConvexPotential f = ConvexPotential::combination({1.0, 1.0}, {vertex_potential(P, s), vertex_potential(Q, s)});
  return compare_to_volume(f, volume(minkowski_sum(P, Q)), cfg);
}

struct MixedBridgePoint {
  MultiIndex t;
  BridgeComparison comparison;
};

/// For every t on the degree-n grid of the k-simplex, the quadrature of
/// det hess(sum t_j f_j) against the mixed-volume polynomial at t.
inline std::vector<MixedBridgePoint> mixed_volume_bridge(const std::vector<Polytope>& bodies, double s = 2.0,
                                                         const QuadratureConfig& cfg = {}) {
  if (bodies.empty()) throw InvalidArgument("mixed_volume_bridge: no bodies");
  const MixedVolumeTable table = mixed_volumes(bodies, cfg.workers);
  std::vector<ConvexPotential> terms;
  for (const auto& b : bodies) terms.push_back(vertex_potential(b, s));
  std::vector<MixedBridgePoint> out;
  for (const auto& t : simplex_indices(bodies.size(), static_cast<unsigned>(table.n()))) {
    std::vector<double> coefs;
    RVec tr;
    for (auto e : t.entries()) {
      coefs.push_back(static_cast<double>(e));
      tr.emplace_back(static_cast<unsigned long>(e));
    }
    const ConvexPotential f = ConvexPotential::combination(coefs, terms);
    out.push_back({t, compare_to_volume(f, table.polynomial(tr), cfg)});
  }
  return out;
}

}  // namespace ck
