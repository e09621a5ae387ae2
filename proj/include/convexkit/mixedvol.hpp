#pragma once

// Exact mixed volumes and the inequality harness built on them.
//
// For bodies Y_1..Y_k in R^n the map t -> vol(t_1 Y_1 + ... + t_k Y_k) is a
// homogeneous polynomial sum_{|J|=n} b_J t^J [Y^J] with multinomial b_J.
// Evaluating it at every multiindex I of degree n gives the square system
// A x = p with A[I][J] = b_J I^J, which is invertible over Q; solving it
// exactly yields the whole mixed-volume table.

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "convexkit/errors.hpp"
#include "convexkit/geometry.hpp"
#include "convexkit/rational.hpp"

namespace ck {

inline constexpr std::size_t kMaxInterpRows = 200;

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<unsigned> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw InvalidArgument("multiindex: need at least one entry");
    for (auto e : entries_) degree_ += e;
  }

  std::size_t size() const { return entries_.size(); }
  unsigned degree() const { return degree_; }
  unsigned operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<unsigned>& entries() const { return entries_; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) { return a.entries_ <=> b.entries_; }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < entries_.size(); ++i) s += (i ? "," : "") + std::to_string(entries_[i]);
    return s + ")";
  }

 private:
  std::vector<unsigned> entries_;
  unsigned degree_ = 0;
};

/// All k-multiindices of degree n, in decreasing lexicographic order.
inline std::vector<MultiIndex> simplex_indices(std::size_t k, unsigned n) {
  if (k == 0) throw InvalidArgument("simplex_indices: k must be positive");
  std::vector<MultiIndex> out;
  std::vector<unsigned> cur(k, 0);
  auto rec = [&](auto&& self, std::size_t pos, unsigned left) -> void {
    if (pos + 1 == k) {
      cur[pos] = left;
      out.emplace_back(cur);
      return;
    }
    for (unsigned v = left + 1; v-- > 0;) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, n);
  return out;
}

/// |J|! / (j_1! ... j_k!)
inline Integer multinomial(const MultiIndex& J) {
  Integer r = factorial(J.degree());
  for (auto j : J.entries()) r /= factorial(j);
  return r;
}

/// A[I][J] = b_J * prod_m i_m^{j_m}, with 0^0 = 1.
inline RMat interp_matrix(std::size_t k, unsigned n) {
  if (k == 0 || n == 0) throw InvalidArgument("interp_matrix: k and n must be positive");
  const auto idx = simplex_indices(k, n);
  if (idx.size() > kMaxInterpRows)
    throw ResourceGuard("interp_matrix: " + std::to_string(idx.size()) + " rows exceeds guard " +
                        std::to_string(kMaxInterpRows));
  RMat A(idx.size(), RVec(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (std::size_t c = 0; c < idx.size(); ++c) {
      Integer v = multinomial(idx[c]);
      for (std::size_t m = 0; m < k; ++m) {
        Integer p;
        mpz_ui_pow_ui(p.get_mpz_t(), idx[r][m], idx[c][m]);
        v *= p;
      }
      A[r][c] = Rational(v);
    }
  }
  return A;
}

class MixedVolumeTable {
 public:
  MixedVolumeTable(std::size_t n, std::size_t k, std::map<MultiIndex, Rational> values)
      : n_(n), k_(k), values_(std::move(values)) {
    for (const auto& I : simplex_indices(k_, static_cast<unsigned>(n_)))
      if (!values_.count(I)) throw InvalidArgument("mixed-volume table: missing entry " + I.str());
    if (values_.size() != simplex_indices(k_, static_cast<unsigned>(n_)).size())
      throw InvalidArgument("mixed-volume table: entries outside the degree-n simplex");
  }

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  const std::map<MultiIndex, Rational>& values() const { return values_; }
  const Rational& at(const MultiIndex& I) const {
    auto it = values_.find(I);
    if (it == values_.end()) throw InvalidArgument("mixed-volume table: no entry " + I.str());
    return it->second;
  }
  const Rational& at(std::vector<unsigned> I) const { return at(MultiIndex(std::move(I))); }

  /// [Y^{n e_j}], the volume of body j.
  const Rational& body_volume(std::size_t j) const {
    std::vector<unsigned> e(k_, 0);
    e.at(j) = static_cast<unsigned>(n_);
    return at(MultiIndex(e));
  }

  /// sum_J b_J t^J [Y^J] at rational t.
  Rational polynomial(const RVec& t) const {
    if (t.size() != k_) throw DimensionMismatch("mixed-volume polynomial: wrong number of parameters");
    Rational s = 0;
    for (const auto& [J, v] : values_) {
      Rational term = Rational(multinomial(J)) * v;
      for (std::size_t m = 0; m < k_; ++m) term *= pow(t[m], J[m]);
      s += term;
    }
    return s;
  }

  friend bool operator==(const MixedVolumeTable&, const MixedVolumeTable&) = default;

 private:
  std::size_t n_;
  std::size_t k_;
  std::map<MultiIndex, Rational> values_;
};

/// vol(i_1 Y_1 + ... + i_k Y_k)
inline Rational combination_volume(const std::vector<Polytope>& bodies, const std::vector<unsigned>& coeffs) {
  std::optional<Polytope> sum;
  for (std::size_t j = 0; j < bodies.size(); ++j) {
    if (coeffs[j] == 0) continue;
    Polytope term = scale(bodies[j], Rational(coeffs[j]));
    sum = sum ? minkowski_sum(*sum, term) : term;
  }
  if (!sum) return 0;
  return volume(*sum);
}

/// Volume evaluations run on up to `workers` threads; the solve is serial.
inline MixedVolumeTable mixed_volumes(const std::vector<Polytope>& bodies, std::size_t workers = 1) {
  if (bodies.empty()) throw InvalidArgument("mixed_volumes: no bodies");
  const std::size_t n = bodies.front().dim();
  for (const auto& b : bodies)
    if (b.dim() != n) throw DimensionMismatch("mixed_volumes: bodies differ in ambient dimension");
  const std::size_t k = bodies.size();
  const auto idx = simplex_indices(k, static_cast<unsigned>(n));
  RMat A = interp_matrix(k, static_cast<unsigned>(n));

  RVec p(idx.size());
  workers = std::max<std::size_t>(1, std::min(workers, idx.size()));
  if (workers == 1) {
    for (std::size_t r = 0; r < idx.size(); ++r) p[r] = combination_volume(bodies, idx[r].entries());
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t r = w; r < idx.size(); r += workers) p[r] = combination_volume(bodies, idx[r].entries());
      }));
    }
    for (auto& j : jobs) j.get();
  }

  // Nonsingular for every (k, n); a failure here is a bug, not an input error.
  ExactSolve sol = solve_exact(std::move(A), std::move(p));
  std::map<MultiIndex, Rational> values;
  for (std::size_t r = 0; r < idx.size(); ++r) values.emplace(idx[r], sol.solution[r]);
  return MixedVolumeTable(n, k, std::move(values));
}

struct MidpointCheck {
  MultiIndex minus, centre, plus;
  Rational margin;  // [Y^centre]^2 - [Y^minus][Y^plus]
  bool vacuous = false;  // right-hand side is zero
  bool holds() const { return sgn(margin) >= 0; }
};

/// Every triple (y-, y0, y+) with y+ - y0 = y0 - y- = e_a - e_b, checked in
/// the exponentiated form [Y^y0]^2 >= [Y^y-][Y^y+].
inline std::vector<MidpointCheck> af_midpoint_checks(const MixedVolumeTable& table) {
  std::vector<MidpointCheck> out;
  const std::size_t k = table.k();
  for (const auto& [y0, v0] : table.values()) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        if (y0[a] == 0 || y0[b] == 0) continue;
        std::vector<unsigned> plus = y0.entries(), minus = y0.entries();
        ++plus[a];
        --plus[b];
        --minus[a];
        ++minus[b];
        MidpointCheck c{MultiIndex(minus), y0, MultiIndex(plus), 0, false};
        const Rational rhs = table.at(c.minus) * table.at(c.plus);
        c.margin = v0 * v0 - rhs;
        c.vacuous = sgn(rhs) == 0;
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

struct LowerBoundCheck {
  MultiIndex index;
  Rational margin;  // [Y^I]^n - prod_j vol(Y_j)^{i_j}
  bool holds() const { return sgn(margin) >= 0; }
};

inline std::vector<LowerBoundCheck> lower_bound_check(const MixedVolumeTable& table) {
  std::vector<LowerBoundCheck> out;
  for (const auto& [I, v] : table.values()) {
    Rational rhs = 1;
    for (std::size_t j = 0; j < table.k(); ++j) rhs *= pow(table.body_volume(j), I[j]);
    out.push_back({I, pow(v, static_cast<unsigned long>(table.n())) - rhs});
  }
  return out;
}

namespace detail {

// n-th root of a nonnegative rational, correctly rounded at `bits` precision.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t bits = 256) { mpfr_init2(v_, bits); }
  BigFloat(const BigFloat&) = delete;
  BigFloat& operator=(const BigFloat&) = delete;
  ~BigFloat() { mpfr_clear(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

}  // namespace detail

/// Pass/fail of the Brunn-Minkowski root form and the exact binomial identity.
struct BmiReport {
  Rational vol_sum, vol_first, vol_second;
  Rational binomial_sum;  // sum_j C(n,j) [Y1^j, Y2^(n-j)]
  bool binomial_exact = false;
  double lhs = 0;     // vol(Y1+Y2)^(1/n)
  double rhs = 0;     // vol(Y1)^(1/n) + vol(Y2)^(1/n)
  double margin = 0;  // lhs - rhs, computed at 256 bits before rounding
  bool holds = false;
  bool homothetic = false;
  bool equality = false;  // |margin| <= 1e-12
};

/// Y2 = lambda Y1 + t for some rational lambda > 0 and translation t.
inline bool homothetic(const Polytope& a, const Polytope& b) {
  if (a.dim() != b.dim() || a.size() != b.size()) return false;
  if (a.size() == 1) return true;
  // Positive homothety preserves lexicographic order of vertices.
  const RVec da = a.vertices()[1] - a.vertices()[0];
  const RVec db = b.vertices()[1] - b.vertices()[0];
  Rational lambda = 0;
  for (std::size_t i = 0; i < da.size(); ++i)
    if (sgn(da[i]) != 0) {
      lambda = db[i] / da[i];
      break;
    }
  if (sgn(lambda) <= 0) return false;
  const RVec t = b.vertices()[0] - lambda * a.vertices()[0];
  for (std::size_t v = 0; v < a.size(); ++v)
    if (lambda * a.vertices()[v] + t != b.vertices()[v]) return false;
  return true;
}

inline BmiReport bmi_check(const Polytope& Y1, const Polytope& Y2, double tol = 1e-9) {
  if (Y1.dim() != Y2.dim()) throw DimensionMismatch("bmi_check: bodies differ in ambient dimension");
  const std::size_t n = Y1.dim();
  BmiReport r;
  r.vol_first = volume(Y1);
  r.vol_second = volume(Y2);
  r.vol_sum = volume(minkowski_sum(Y1, Y2));
  const MixedVolumeTable table = mixed_volumes({Y1, Y2});
  for (unsigned j = 0; j <= n; ++j) {
    Integer c;
    mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n), j);
    r.binomial_sum += Rational(c) * table.at({j, static_cast<unsigned>(n) - j});
  }
  r.binomial_exact = r.binomial_sum == r.vol_sum;

  auto root = [n](const Rational& q, detail::BigFloat& out) {
    mpfr_set_q(out.get(), q.get_mpq_t(), MPFR_RNDN);
    mpfr_rootn_ui(out.get(), out.get(), static_cast<unsigned long>(n), MPFR_RNDN);
  };
  detail::BigFloat lhs, a, b, diff;
  root(r.vol_sum, lhs);
  root(r.vol_first, a);
  root(r.vol_second, b);
  mpfr_add(a.get(), a.get(), b.get(), MPFR_RNDN);
  mpfr_sub(diff.get(), lhs.get(), a.get(), MPFR_RNDN);
  r.lhs = mpfr_get_d(lhs.get(), MPFR_RNDN);
  r.rhs = mpfr_get_d(a.get(), MPFR_RNDN);
  r.margin = mpfr_get_d(diff.get(), MPFR_RNDN);
  r.holds = r.margin >= -tol;
  r.homothetic = homothetic(Y1, Y2);
  r.equality = std::abs(r.margin) <= 1e-12;
  return r;
}

struct LogConcavityCheck {
  Rational s, mid, u;
  Rational margin;  // vol(Y_mid)^2 - vol(Y_s) vol(Y_u)
  bool holds() const { return sgn(margin) >= 0; }
};

struct LogConcavityReport {
  std::vector<Rational> t;
  std::vector<Rational> volumes;
  std::vector<LogConcavityCheck> checks;
};

/// vol(Y_t) for Y_t = (1-t) Y0 + t Y1 on t = i/steps, with the midpoint
/// inequality on every three consecutive grid points.
inline LogConcavityReport minkowski_logconcavity(const Polytope& Y0, const Polytope& Y1, std::size_t steps) {
  if (Y0.dim() != Y1.dim()) throw DimensionMismatch("minkowski_logconcavity: bodies differ in ambient dimension");
  if (steps < 3) throw InvalidArgument("minkowski_logconcavity: need at least 3 steps");
  LogConcavityReport rep;
  for (std::size_t i = 0; i <= steps; ++i) {
    Rational t(static_cast<unsigned long>(i), static_cast<unsigned long>(steps));
    t.canonicalize();
    rep.t.push_back(t);
    rep.volumes.push_back(volume(minkowski_sum(scale(Y0, 1 - t), scale(Y1, t))));
  }
  for (std::size_t i = 0; i + 2 <= steps; ++i) {
    rep.checks.push_back({rep.t[i], rep.t[i + 1], rep.t[i + 2],
                          rep.volumes[i + 1] * rep.volumes[i + 1] - rep.volumes[i] * rep.volumes[i + 2]});
  }
  return rep;
}

}  // namespace ck
