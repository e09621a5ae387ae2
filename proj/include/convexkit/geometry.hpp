#pragma once

// Exact rational polytope kernel.
//
// A Polytope is stored in canonical V-form: its extreme points, duplicate
// free and sorted lexicographically. Construction always goes through hull(),
// which also records the affine hull, the facet halfspaces (relative to the
// affine hull) and the exact volume.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "convexkit/errors.hpp"
#include "convexkit/rational.hpp"

namespace ck {

inline constexpr std::size_t kMaxHullDim = 4;
inline constexpr std::size_t kMaxFaceVertices = 30;

/// normal . x <= offset, tight exactly on the listed canonical vertices.
struct Halfspace {
  RVec normal;
  Rational offset;
  std::vector<std::size_t> vertices;
};

struct FaceDescriptor {
  std::vector<std::size_t> vertex_subset;
  std::size_t dim = 0;

  friend bool operator==(const FaceDescriptor&, const FaceDescriptor&) = default;
};

namespace detail {

struct HullData {
  std::size_t affine_dim = 0;
  RVec base;
  // Affine hull equations: eq . x == eq . base.
  RMat equations;
  std::vector<std::size_t> pivots;
  std::vector<Halfspace> facets;
  Rational volume = 0;
};

}  // namespace detail

class Polytope;
Polytope hull(const std::vector<RVec>& points, std::size_t n);

class Polytope {
 public:
  std::size_t dim() const { return dim_; }
  const std::vector<RVec>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  /// Dimension of the affine hull of the vertices.
  std::size_t affine_dim() const { return data_->affine_dim; }
  bool full_dimensional() const { return affine_dim() == dim_; }

  /// Facets relative to the affine hull (empty for a single point).
  const std::vector<Halfspace>& facets() const { return data_->facets; }
  const RMat& affine_equations() const { return data_->equations; }
  const RVec& affine_base() const { return data_->base; }

  const Rational& cached_volume() const { return data_->volume; }

  friend bool operator==(const Polytope& a, const Polytope& b) {
    return a.dim_ == b.dim_ && a.vertices_ == b.vertices_;
  }

 private:
  friend Polytope hull(const std::vector<RVec>& points, std::size_t n);
  std::size_t dim_ = 0;
  std::vector<RVec> vertices_;
  std::shared_ptr<const detail::HullData> data_;
};

namespace detail {

inline bool lex_less(const RVec& a, const RVec& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](const Rational& x, const Rational& y) { return x < y; });
}

inline RVec project(const RVec& p, const std::vector<std::size_t>& pivots) {
  RVec q;
  q.reserve(pivots.size());
  for (auto c : pivots) q.push_back(p[c]);
  return q;
}

struct Plane {
  RVec a;
  Rational b;
};

// Hyperplane through d affinely independent points of Q^d.
inline Plane plane_through(const std::vector<const RVec*>& pts, std::size_t d) {
  EchelonBasis eb(d + 1);
  for (const RVec* p : pts) {
    RVec row(*p);
    row.push_back(Rational(-1));
    eb.insert(row);
  }
  RMat ns = eb.null_space();
  if (ns.size() != 1) throw Error("internal: facet points are not affinely independent");
  Plane pl;
  pl.a.assign(ns[0].begin(), ns[0].begin() + static_cast<std::ptrdiff_t>(d));
  pl.b = ns[0][d];
  return pl;
}

inline void normalize(Plane& pl) {
  for (const auto& x : pl.a) {
    if (sgn(x) != 0) {
      Rational s = abs(x);
      for (auto& y : pl.a) y /= s;
      pl.b /= s;
      return;
    }
  }
}

struct PlaneLess {
  bool operator()(const Plane& x, const Plane& y) const {
    if (lex_less(x.a, y.a)) return true;
    if (lex_less(y.a, x.a)) return false;
    return x.b < y.b;
  }
};

struct Simplex {
  std::vector<std::size_t> verts;  // sorted
  Plane plane;
  std::vector<std::size_t> outside;
  bool alive = true;
};

using Ridge = std::vector<std::size_t>;

// Beneath-beyond insertion on full-dimensional points of Q^d, d >= 2.
// Returns the simplicial boundary.
inline std::vector<Simplex> simplicial_hull(const std::vector<RVec>& q,
                                            const std::vector<std::size_t>& initial,
                                            std::size_t d) {
  std::vector<Simplex> facets;
  std::map<Ridge, std::vector<std::size_t>> ridges;

  RVec centre(d, Rational(0));
  for (auto i : initial) centre = centre + q[i];
  centre = Rational(1, static_cast<unsigned long>(d + 1)) * centre;

  auto ridges_of = [](const std::vector<std::size_t>& verts) {
    std::vector<Ridge> out;
    for (std::size_t skip = 0; skip < verts.size(); ++skip) {
      Ridge r;
      for (std::size_t i = 0; i < verts.size(); ++i)
        if (i != skip) r.push_back(verts[i]);
      out.push_back(std::move(r));
    }
    return out;
  };

  auto add_facet = [&](std::vector<std::size_t> verts) -> std::size_t {
    std::sort(verts.begin(), verts.end());
    std::vector<const RVec*> pts;
    for (auto v : verts) pts.push_back(&q[v]);
    Plane pl = plane_through(pts, d);
    if (dot(pl.a, centre) > pl.b) {
      for (auto& x : pl.a) x = -x;
      pl.b = -pl.b;
    }
    facets.push_back(Simplex{std::move(verts), std::move(pl), {}, true});
    const std::size_t id = facets.size() - 1;
    for (auto& r : ridges_of(facets[id].verts)) ridges[r].push_back(id);
    return id;
  };

  auto above = [&](const Simplex& f, std::size_t p) { return dot(f.plane.a, q[p]) > f.plane.b; };

  for (std::size_t skip = 0; skip < initial.size(); ++skip) {
    std::vector<std::size_t> verts;
    for (std::size_t i = 0; i < initial.size(); ++i)
      if (i != skip) verts.push_back(initial[i]);
    add_facet(verts);
  }

  std::vector<bool> in_initial(q.size(), false);
  for (auto i : initial) in_initial[i] = true;
  for (std::size_t p = 0; p < q.size(); ++p) {
    if (in_initial[p]) continue;
    for (std::size_t f = 0; f < facets.size(); ++f) {
      if (above(facets[f], p)) {
        facets[f].outside.push_back(p);
        break;
      }
    }
  }

  for (;;) {
    std::size_t start = facets.size();
    for (std::size_t f = 0; f < facets.size(); ++f) {
      if (facets[f].alive && !facets[f].outside.empty()) {
        start = f;
        break;
      }
    }
    if (start == facets.size()) break;

    // Farthest outside point of this facet (unnormalized distance).
    std::size_t apex = facets[start].outside.front();
    Rational best = dot(facets[start].plane.a, q[apex]) - facets[start].plane.b;
    for (auto p : facets[start].outside) {
      Rational h = dot(facets[start].plane.a, q[p]) - facets[start].plane.b;
      if (h > best) {
        best = h;
        apex = p;
      }
    }

    // Visible region by flooding across ridges.
    std::vector<std::size_t> visible{start};
    std::set<std::size_t> seen{start};
    std::vector<std::pair<Ridge, std::size_t>> horizon;
    for (std::size_t i = 0; i < visible.size(); ++i) {
      const std::size_t f = visible[i];
      for (auto& r : ridges_of(facets[f].verts)) {
        for (auto g : ridges[r]) {
          if (g == f || !facets[g].alive) continue;
          if (seen.count(g)) continue;
          if (above(facets[g], apex)) {
            seen.insert(g);
            visible.push_back(g);
          }
        }
      }
    }
    for (auto f : visible) {
      for (auto& r : ridges_of(facets[f].verts)) {
        for (auto g : ridges[r]) {
          if (g != f && facets[g].alive && !seen.count(g)) horizon.emplace_back(r, g);
        }
      }
    }

    std::vector<std::size_t> orphans;
    for (auto f : visible) {
      facets[f].alive = false;
      for (auto p : facets[f].outside)
        if (p != apex) orphans.push_back(p);
      facets[f].outside.clear();
      for (auto& r : ridges_of(facets[f].verts)) {
        auto& owners = ridges[r];
        owners.erase(std::remove(owners.begin(), owners.end(), f), owners.end());
        if (owners.empty()) ridges.erase(r);
      }
    }

    std::vector<std::size_t> created;
    for (auto& [r, _] : horizon) {
      std::vector<std::size_t> verts = r;
      verts.push_back(apex);
      created.push_back(add_facet(std::move(verts)));
    }

    for (auto p : orphans) {
      bool placed = false;
      for (auto f : created) {
        if (above(facets[f], p)) {
          facets[f].outside.push_back(p);
          placed = true;
          break;
        }
      }
      if (placed) continue;
      for (std::size_t f = 0; f < facets.size(); ++f) {
        if (facets[f].alive && above(facets[f], p)) {
          facets[f].outside.push_back(p);
          break;
        }
      }
    }
  }

  std::vector<Simplex> out;
  for (auto& f : facets)
    if (f.alive) out.push_back(std::move(f));
  return out;
}

}  // namespace detail

/// Canonical hull of a finite point set in Q^n.
inline Polytope hull(const std::vector<RVec>& points, std::size_t n) {
  if (n == 0) throw InvalidArgument("hull: ambient dimension must be positive");
  if (points.empty()) throw InvalidArgument("hull: empty point list");
  for (const auto& p : points)
    if (p.size() != n) throw DimensionMismatch("hull: point of length " + std::to_string(p.size()) +
                                               " in ambient dimension " + std::to_string(n));
  if (n > kMaxHullDim)
    throw ResourceGuard("hull: ambient dimension " + std::to_string(n) + " exceeds guard " +
                        std::to_string(kMaxHullDim));

  std::vector<RVec> pts(points);
  std::sort(pts.begin(), pts.end(), detail::lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto data = std::make_shared<detail::HullData>();
  data->base = pts.front();

  EchelonBasis span(n);
  std::vector<std::size_t> independent{0};
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (span.insert(pts[i] - pts[0])) independent.push_back(i);
  const std::size_t d = span.rank();
  data->affine_dim = d;
  data->pivots = span.pivots();
  data->equations = span.null_space();

  std::vector<RVec> q;
  q.reserve(pts.size());
  for (const auto& p : pts) q.push_back(detail::project(p, data->pivots));

  auto lift_normal = [&](const RVec& a) {
    RVec full(n, Rational(0));
    for (std::size_t i = 0; i < d; ++i) full[data->pivots[i]] = a[i];
    return full;
  };

  Polytope P;
  P.dim_ = n;

  if (d == 0) {
    P.vertices_ = {pts.front()};
  } else if (d == 1) {
    auto [lo, hi] = std::minmax_element(q.begin(), q.end(),
                                        [](const RVec& a, const RVec& b) { return a[0] < b[0]; });
    const std::size_t ilo = static_cast<std::size_t>(lo - q.begin());
    const std::size_t ihi = static_cast<std::size_t>(hi - q.begin());
    P.vertices_ = {pts[ilo], pts[ihi]};
    std::sort(P.vertices_.begin(), P.vertices_.end(), detail::lex_less);
    const Rational qlo = q[ilo][0], qhi = q[ihi][0];
    for (std::size_t v = 0; v < 2; ++v) {
      const Rational qv = P.vertices_[v][data->pivots[0]];
      Halfspace h;
      if (qv == qhi) {
        h.normal = lift_normal(RVec{Rational(1)});
        h.offset = qhi;
      } else {
        h.normal = lift_normal(RVec{Rational(-1)});
        h.offset = -qlo;
      }
      h.vertices = {v};
      data->facets.push_back(std::move(h));
    }
    if (n == 1) data->volume = qhi - qlo;
  } else {
    auto simplices = detail::simplicial_hull(q, independent, d);

    std::map<detail::Plane, std::vector<std::size_t>, detail::PlaneLess> merged;
    for (auto& s : simplices) {
      detail::Plane pl = s.plane;
      detail::normalize(pl);
      auto& vs = merged[pl];
      vs.insert(vs.end(), s.verts.begin(), s.verts.end());
    }
    std::set<std::size_t> used;
    for (auto& s : simplices) used.insert(s.verts.begin(), s.verts.end());

    std::vector<std::size_t> extreme;
    for (auto u : used) {
      EchelonBasis normals(d);
      for (const auto& [pl, _] : merged)
        if (dot(pl.a, q[u]) == pl.b) normals.insert(pl.a);
      if (normals.rank() == d) extreme.push_back(u);
    }
    for (auto e : extreme) P.vertices_.push_back(pts[e]);
    std::sort(P.vertices_.begin(), P.vertices_.end(), detail::lex_less);

    std::vector<RVec> qv;
    for (const auto& v : P.vertices_) qv.push_back(detail::project(v, data->pivots));
    for (const auto& [pl, _] : merged) {
      Halfspace h;
      h.normal = lift_normal(pl.a);
      h.offset = pl.b;
      for (std::size_t i = 0; i < qv.size(); ++i)
        if (dot(pl.a, qv[i]) == pl.b) h.vertices.push_back(i);
      data->facets.push_back(std::move(h));
    }

    if (d == n) {
      // Cone over the boundary triangulation with apex at the first vertex.
      const RVec& apex = qv.front();
      Rational total = 0;
      for (auto& s : simplices) {
        RMat m;
        for (auto v : s.verts) m.push_back(q[v] - apex);
        total += abs(determinant(std::move(m)));
      }
      data->volume = total / Rational(factorial(n));
    }
  }

  P.data_ = std::move(data);
  return P;
}

inline Polytope hull(const std::vector<RVec>& points) {
  if (points.empty()) throw InvalidArgument("hull: empty point list");
  return hull(points, points.front().size());
}

inline Polytope point_polytope(const RVec& p) { return hull({p}, p.size()); }

inline Polytope minkowski_sum(const Polytope& P, const Polytope& Q) {
  if (P.dim() != Q.dim()) throw DimensionMismatch("minkowski_sum: ambient dimensions differ");
  std::vector<RVec> sums;
  sums.reserve(P.size() * Q.size());
  for (const auto& a : P.vertices())
    for (const auto& b : Q.vertices()) sums.push_back(a + b);
  return hull(sums, P.dim());
}

inline Polytope scale(const Polytope& P, const Rational& t) {
  if (sgn(t) < 0) throw InvalidArgument("scale: negative factor");
  if (sgn(t) == 0) return point_polytope(RVec(P.dim(), Rational(0)));
  std::vector<RVec> pts;
  for (const auto& v : P.vertices()) pts.push_back(t * v);
  return hull(pts, P.dim());
}

inline Polytope translate(const Polytope& P, const RVec& t) {
  if (t.size() != P.dim()) throw DimensionMismatch("translate: vector length");
  std::vector<RVec> pts;
  for (const auto& v : P.vertices()) pts.push_back(v + t);
  return hull(pts, P.dim());
}

/// n-dimensional volume; zero for lower-dimensional bodies.
inline Rational volume(const Polytope& P) { return P.cached_volume(); }

inline Rational support(const Polytope& P, const RVec& u) {
  if (u.size() != P.dim()) throw DimensionMismatch("support: direction length");
  Rational best = dot(u, P.vertices().front());
  for (const auto& v : P.vertices()) {
    Rational s = dot(u, v);
    if (s > best) best = s;
  }
  return best;
}

inline std::size_t affine_rank(const std::vector<RVec>& pts) {
  if (pts.empty()) return 0;
  EchelonBasis b(pts.front().size());
  for (std::size_t i = 1; i < pts.size(); ++i) b.insert(pts[i] - pts[0]);
  return b.rank();
}

inline bool in_affine_hull(const Polytope& P, const RVec& x) {
  if (x.size() != P.dim()) throw DimensionMismatch("in_affine_hull: point length");
  for (const auto& e : P.affine_equations())
    if (dot(e, x) != dot(e, P.affine_base())) return false;
  return true;
}

/// Exact membership in the relative interior.
inline bool relative_interior_contains(const Polytope& P, const RVec& x) {
  if (x.size() != P.dim()) throw DimensionMismatch("relative_interior_contains: point length");
  if (!in_affine_hull(P, x)) return false;
  for (const auto& h : P.facets())
    if (!(dot(h.normal, x) < h.offset)) return false;
  return true;
}

/// Floating diagnostics for membership of a computed point.
struct MembershipMargin {
  double affine_residual = 0;  // largest normalized violation of the affine hull equations
  double min_slack = 0;        // smallest normalized facet slack; +inf with no facets

  /// Nonnegative exactly when the point passes the membership test at
  /// tolerance `tol` (up to the strictness of the facet condition).
  double within(double tol) const { return std::min(tol - affine_residual, min_slack + tol); }
};

inline MembershipMargin membership_margin(const Polytope& P, std::span<const double> x) {
  if (x.size() != P.dim()) throw DimensionMismatch("membership_margin: point length");
  MembershipMargin m;
  m.min_slack = std::numeric_limits<double>::infinity();
  const auto base = to_double(P.affine_base());
  for (const auto& e : P.affine_equations()) {
    double s = 0, nn = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double ei = e[i].get_d();
      s += ei * (x[i] - base[i]);
      nn += ei * ei;
    }
    m.affine_residual = std::max(m.affine_residual, std::abs(s) / std::sqrt(nn));
  }
  for (const auto& h : P.facets()) {
    double s = h.offset.get_d(), nn = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double ai = h.normal[i].get_d();
      s -= ai * x[i];
      nn += ai * ai;
    }
    m.min_slack = std::min(m.min_slack, s / std::sqrt(nn));
  }
  return m;
}

/// Relative-interior test for floating points: the point must sit on the
/// affine hull up to `margin`, and no facet may be violated by more than
/// `margin`. A single-point polytope has no facets, so only the affine
/// condition applies.
inline bool relative_interior_contains(const Polytope& P, std::span<const double> x, double margin) {
  const auto m = membership_margin(P, x);
  return m.affine_residual <= margin && m.min_slack > -margin;
}

/// Proper nonempty faces, each listed once by its canonical vertex indices.
inline std::vector<FaceDescriptor> faces(const Polytope& P) {
  if (P.size() > kMaxFaceVertices)
    throw ResourceGuard("faces: " + std::to_string(P.size()) + " vertices exceeds guard " +
                        std::to_string(kMaxFaceVertices));
  if (P.dim() > kMaxHullDim) throw ResourceGuard("faces: dimension exceeds guard");

  std::set<std::vector<std::size_t>> found;
  std::vector<std::vector<std::size_t>> queue;
  for (const auto& h : P.facets()) {
    if (found.insert(h.vertices).second) queue.push_back(h.vertices);
  }
  for (std::size_t i = 0; i < queue.size(); ++i) {
    for (const auto& h : P.facets()) {
      std::vector<std::size_t> meet;
      std::set_intersection(queue[i].begin(), queue[i].end(), h.vertices.begin(), h.vertices.end(),
                            std::back_inserter(meet));
      if (meet.empty() || meet == queue[i]) continue;
      if (found.insert(meet).second) queue.push_back(meet);
    }
  }

  std::vector<FaceDescriptor> out;
  for (const auto& vs : found) {
    std::vector<RVec> pts;
    for (auto v : vs) pts.push_back(P.vertices()[v]);
    out.push_back(FaceDescriptor{vs, affine_rank(pts)});
  }
  std::sort(out.begin(), out.end(), [](const FaceDescriptor& a, const FaceDescriptor& b) {
    return a.dim != b.dim ? a.dim < b.dim : a.vertex_subset < b.vertex_subset;
  });
  return out;
}

/// Hull of the vertices indexed by a face.
inline Polytope face_polytope(const Polytope& P, const FaceDescriptor& f) {
  std::vector<RVec> pts;
  for (auto v : f.vertex_subset) pts.push_back(P.vertices().at(v));
  return hull(pts, P.dim());
}

}  // namespace ck
