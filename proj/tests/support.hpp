#pragma once

// Generators and independent oracles shared by the test programs. The
// oracles deliberately avoid the library's own hull, volume and solver code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "convexkit/convexkit.hpp"

namespace cktest {

using ck::Complex;
using ck::CMat;
using ck::CVec;
using ck::Mat;
using ck::Polytope;
using ck::Rational;
using ck::RMat;
using ck::RVec;
using ck::Vec;

using Rng = std::mt19937_64;

inline Rational random_rational(Rng& rng, long lo, long hi, long den = 4) {
  std::uniform_int_distribution<long> d(lo * den, hi * den);
  Rational r(d(rng), den);
  r.canonicalize();
  return r;
}

inline RVec random_point(Rng& rng, std::size_t n, long lo = -3, long hi = 3, long den = 4) {
  RVec p;
  for (std::size_t i = 0; i < n; ++i) p.push_back(random_rational(rng, lo, hi, den));
  return p;
}

inline std::vector<RVec> random_points(Rng& rng, std::size_t count, std::size_t n, long lo = -3, long hi = 3,
                                       long den = 4) {
  std::vector<RVec> pts;
  for (std::size_t i = 0; i < count; ++i) pts.push_back(random_point(rng, n, lo, hi, den));
  return pts;
}

/// Hull of `count` random points, redrawn until full-dimensional.
inline Polytope random_polytope(Rng& rng, std::size_t n, std::size_t count, long lo = -3, long hi = 3,
                                long den = 4) {
  for (;;) {
    Polytope P = ck::hull(random_points(rng, count, n, lo, hi, den), n);
    if (P.full_dimensional()) return P;
  }
}

inline Vec random_vec(Rng& rng, std::size_t n, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  Vec x(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = u(rng);
  return x;
}

inline CVec random_cvec(Rng& rng, std::size_t k) {
  std::normal_distribution<double> g;
  CVec v(static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex(g(rng), g(rng));
  return v;
}

inline CMat random_skew_adjoint(Rng& rng, std::size_t k) {
  std::normal_distribution<double> g;
  CMat a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (a - a.adjoint());
}

/// Strictly positive random convex combination of the rows (Dirichlet-like).
inline Vec random_interior_combination(Rng& rng, const std::vector<Vec>& pts) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> c(pts.size());
  double s = 0;
  for (auto& x : c) s += (x = e(rng) + 1e-3);
  Vec out = Vec::Zero(pts.front().size());
  for (std::size_t i = 0; i < pts.size(); ++i) out += (c[i] / s) * pts[i];
  return out;
}

/// Rank in [1, max_rank], between 1 and max_k integer weights in [-2, 2].
inline ck::TorusWeightSystem random_weights(Rng& rng, std::size_t max_rank = 3, std::size_t max_k = 8) {
  std::uniform_int_distribution<std::size_t> rank_d(1, max_rank), k_d(1, max_k);
  std::uniform_int_distribution<long long> e(-2, 2);
  const std::size_t n = rank_d(rng), k = k_d(rng);
  std::vector<std::vector<long long>> w(k, std::vector<long long>(n));
  for (auto& row : w)
    for (auto& x : row) x = e(rng);
  return ck::TorusWeightSystem(n, std::move(w));
}

/// Amplitudes with a random nonempty support.
inline ck::ProjectiveVector random_projective(Rng& rng, std::size_t k, bool full_support = false) {
  CVec c = random_cvec(rng, k);
  if (!full_support) {
    std::bernoulli_distribution keep(0.7);
    for (Eigen::Index j = 0; j < c.size(); ++j)
      if (!keep(rng)) c[j] = 0;
    if (c.isZero(0)) c[0] = Complex(1, 0);
  }
  return ck::ProjectiveVector::from_cvec(c);
}

inline Polytope box(std::size_t n, long side = 1) {
  std::vector<RVec> pts;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    RVec p(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) p[i] = side;
    pts.push_back(p);
  }
  return ck::hull(pts, n);
}

inline Polytope standard_simplex(std::size_t n) {
  std::vector<RVec> pts{RVec(n, Rational(0))};
  for (std::size_t i = 0; i < n; ++i) {
    RVec e(n, Rational(0));
    e[i] = 1;
    pts.push_back(e);
  }
  return ck::hull(pts, n);
}

inline Polytope segment(std::size_t n, std::size_t axis) {
  RVec e(n, Rational(0));
  e[axis] = 1;
  return ck::hull({RVec(n, Rational(0)), e}, n);
}

// ---- exact linear algebra oracle (independent of the library's solver)

/// A solution of M x = b by Gauss-Jordan elimination, or nullopt when the
/// system is inconsistent. Free variables are set to zero.
inline std::optional<RVec> solve_any(RMat m, RVec b) {
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    std::swap(b[p], b[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c] / m[r][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
      b[i] -= f * b[r];
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (b[i] != 0) return std::nullopt;
  RVec x(cols, Rational(0));
  for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i] / m[i][pivot_col[i]];
  return x;
}

/// True when p is a convex combination of `others`, by Caratheodory: some
/// subset of at most n+1 points carries nonnegative barycentric weights.
inline bool in_convex_hull_brute(const RVec& p, const std::vector<RVec>& others) {
  const std::size_t n = p.size();
  const std::size_t m = others.size();
  const std::size_t max_size = std::min(m, n + 1);
  std::vector<std::size_t> pick;
  std::function<bool(std::size_t)> rec = [&](std::size_t start) -> bool {
    if (!pick.empty()) {
      RMat a(n + 1, RVec(pick.size()));
      RVec b(n + 1);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < pick.size(); ++j) a[i][j] = others[pick[j]][i];
        b[i] = p[i];
      }
      for (std::size_t j = 0; j < pick.size(); ++j) a[n][j] = 1;
      b[n] = 1;
      // A dependent subset may return a negative particular solution, but
      // then a smaller subset carries a nonnegative one.
      if (auto x = solve_any(a, b)) {
        bool nonneg = true;
        for (const auto& v : *x) nonneg = nonneg && v >= 0;
        if (nonneg) return true;
      }
    }
    if (pick.size() == max_size) return false;
    for (std::size_t i = start; i < m; ++i) {
      pick.push_back(i);
      if (rec(i + 1)) return true;
      pick.pop_back();
    }
    return false;
  };
  return rec(0);
}

/// Extreme points of a finite set, each checked against all the others.
inline std::vector<RVec> extreme_points_brute(std::vector<RVec> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<RVec> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<RVec> rest;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != i) rest.push_back(pts[j]);
    if (rest.empty() || !in_convex_hull_brute(pts[i], rest)) out.push_back(pts[i]);
  }
  return out;
}

/// Area of a convex polygon given by its extreme points in any order:
/// angular sort about the centroid, then the shoelace sum.
inline Rational shoelace_area(std::vector<RVec> pts) {
  if (pts.size() < 3) return 0;
  Rational cx = 0, cy = 0;
  for (const auto& p : pts) {
    cx += p[0];
    cy += p[1];
  }
  cx /= static_cast<long>(pts.size());
  cy /= static_cast<long>(pts.size());
  auto angle = [&](const RVec& p) { return std::atan2(Rational(p[1] - cy).get_d(), Rational(p[0] - cx).get_d()); };
  std::sort(pts.begin(), pts.end(), [&](const RVec& a, const RVec& b) { return angle(a) < angle(b); });
  Rational twice = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[(i + 1) % pts.size()];
    twice += a[0] * b[1] - a[1] * b[0];
  }
  return abs(twice) / 2;
}

/// Area of t1 Y1 + t2 Y2 in the plane from vertex sums, without the
/// library's hull or volume code.
inline Rational planar_sum_area(const Polytope& a, const Rational& t1, const Polytope& b, const Rational& t2) {
  std::vector<RVec> sums;
  for (const auto& u : a.vertices())
    for (const auto& v : b.vertices()) sums.push_back(ck::operator+(ck::operator*(t1, u), ck::operator*(t2, v)));
  return shoelace_area(extreme_points_brute(sums));
}

/// Root of an increasing scalar function on [lo, hi] by bisection.
inline double bisect(const std::function<double(double)>& g, double lo, double hi, int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Central finite-difference gradient.
template <class F>
Vec fd_gradient(const F& f, const Vec& x, double h = 1e-5) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

inline Vec to_vec(std::initializer_list<double> v) { return ck::to_vec(std::vector<double>(v)); }

inline RVec rv(std::initializer_list<Rational> v) { return RVec(v); }

}  // namespace cktest
