#pragma once

// Exact rational scalars, vectors and the small amount of exact linear
// algebra the polytope kernel and the mixed-volume solver need.

#include <gmpxx.h>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convexkit/errors.hpp"

namespace ck {

using Rational = mpq_class;
using Integer = mpz_class;
using RVec = std::vector<Rational>;
using RMat = std::vector<RVec>;

/// Parses "p/q", "p", or a plain decimal such as "-0.125" into an exact
/// rational in canonical form.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto fail = [&]() -> Rational {
    throw InvalidArgument("not a rational number: '" + s + "'");
  };
  if (s.empty()) return fail();
  if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
      s.find('E') != std::string::npos) {
    // Decimal literal, possibly with exponent.
    std::size_t epos = s.find_first_of("eE");
    std::string mant = s.substr(0, epos);
    long exp10 = 0;
    if (epos != std::string::npos) {
      try {
        std::size_t used = 0;
        exp10 = std::stol(s.substr(epos + 1), &used);
        if (used != s.size() - epos - 1) return fail();
      } catch (const std::exception&) {
        return fail();
      }
    }
    bool neg = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
      neg = mant[0] == '-';
      mant.erase(0, 1);
    }
    std::size_t dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
      digits = mant.substr(0, dot) + mant.substr(dot + 1);
      exp10 -= static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty()) return fail();
    for (char c : digits)
      if (c < '0' || c > '9') return fail();
    Integer num(digits, 10);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    Rational r = exp10 >= 0 ? Rational(num * scale) : Rational(num, scale);
    r.canonicalize();
    return neg ? Rational(-r) : r;
  }
  Rational r;
  if (r.set_str(s, 10) != 0) return fail();
  if (r.get_den() == 0) return fail();
  r.canonicalize();
  return r;
}

/// "p/q", or "p" when the denominator is 1.
inline std::string format_rational(const Rational& r) { return r.get_str(); }

/// Exact binary value of a finite double.
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("non-finite value cannot be rationalized");
  return Rational(x);
}

/// Rounds x to the nearest multiple of 2^-bits.
inline Rational rationalize(double x, unsigned bits = 40) {
  if (!std::isfinite(x)) throw InvalidArgument("non-finite value cannot be rationalized");
  const double scaled = std::nearbyint(std::ldexp(x, static_cast<int>(bits)));
  Rational r{Integer(scaled)};
  r /= Rational(Integer(1) << bits);
  r.canonicalize();
  return r;
}

inline RVec rationalize(const std::vector<double>& x, unsigned bits = 40) {
  RVec out;
  out.reserve(x.size());
  for (double v : x) out.push_back(rationalize(v, bits));
  return out;
}

inline std::vector<double> to_double(const RVec& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.get_d());
  return out;
}

inline RVec operator+(const RVec& a, const RVec& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector sizes differ");
  RVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline RVec operator-(const RVec& a, const RVec& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector sizes differ");
  RVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline RVec operator*(const Rational& t, const RVec& a) {
  RVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = t * a[i];
  return r;
}

inline Rational dot(const RVec& a, const RVec& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector sizes differ");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline bool is_zero(const RVec& v) {
  for (const auto& x : v)
    if (sgn(x) != 0) return false;
  return true;
}

inline Rational pow(const Rational& base, unsigned long e) {
  Rational r;
  mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), e);
  r.canonicalize();
  return r;
}

inline Integer factorial(unsigned long n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

/// Row-echelon basis built one vector at a time. Each stored row is zero at
/// the pivot columns of the rows stored before it.
class EchelonBasis {
 public:
  explicit EchelonBasis(std::size_t ncols) : ncols_(ncols) {}

  std::size_t rank() const { return rows_.size(); }
  std::size_t ncols() const { return ncols_; }
  const RMat& rows() const { return rows_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  RVec reduce(RVec v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rational& lead = v[pivots_[i]];
      if (sgn(lead) == 0) continue;
      Rational f = lead / rows_[i][pivots_[i]];
      for (std::size_t c = 0; c < ncols_; ++c)
        if (sgn(rows_[i][c]) != 0) v[c] -= f * rows_[i][c];
    }
    return v;
  }

  bool contains(const RVec& v) const { return is_zero(reduce(v)); }

  /// Adds v if independent; returns whether the rank grew.
  bool insert(const RVec& v) {
    if (v.size() != ncols_) throw DimensionMismatch("echelon insert: wrong length");
    RVec r = reduce(v);
    for (std::size_t c = 0; c < ncols_; ++c) {
      if (sgn(r[c]) != 0) {
        rows_.push_back(std::move(r));
        pivots_.push_back(c);
        return true;
      }
    }
    return false;
  }

  /// Basis of {e : <e, row> = 0 for every row}, one vector per free column.
  RMat null_space() const {
    std::vector<bool> is_pivot(ncols_, false);
    for (auto p : pivots_) is_pivot[p] = true;
    RMat out;
    for (std::size_t f = 0; f < ncols_; ++f) {
      if (is_pivot[f]) continue;
      RVec e(ncols_, Rational(0));
      e[f] = 1;
      // Row i involves pivots of rows after i only, so solve bottom-up.
      for (std::size_t ii = rows_.size(); ii-- > 0;) {
        Rational s = 0;
        for (std::size_t c = 0; c < ncols_; ++c)
          if (c != pivots_[ii] && sgn(rows_[ii][c]) != 0) s += rows_[ii][c] * e[c];
        e[pivots_[ii]] = -s / rows_[ii][pivots_[ii]];
      }
      out.push_back(std::move(e));
    }
    return out;
  }

  /// Coordinates c with sum_i c_i * rows[i] == v, or nullopt when v is not
  /// in the span.
  std::optional<RVec> coordinates(const RVec& v) const {
    if (!contains(v)) return std::nullopt;
    const std::size_t r = rows_.size();
    RVec c(r, Rational(0));
    // Row i is zero at pivots of earlier rows: pivot column p_i only sees
    // rows 0..i, so solve top-down.
    for (std::size_t i = 0; i < r; ++i) {
      Rational s = v[pivots_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= c[j] * rows_[j][pivots_[i]];
      c[i] = s / rows_[i][pivots_[i]];
    }
    return c;
  }

 private:
  std::size_t ncols_;
  RMat rows_;
  std::vector<std::size_t> pivots_;
};

inline std::size_t rank(const RMat& rows, std::size_t ncols) {
  EchelonBasis b(ncols);
  for (const auto& r : rows) b.insert(r);
  return b.rank();
}

/// Exact determinant by fraction-based Gaussian elimination.
inline Rational determinant(RMat a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(a[p][c]) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (sgn(a[r][c]) == 0) continue;
      Rational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

/// Result of exact elimination: the solution plus the pivots met on the way.
struct ExactSolve {
  RVec solution;
  std::vector<Rational> pivots;
};

/// Solves the square system A x = b exactly. Throws InvalidArgument when A
/// is singular.
inline ExactSolve solve_exact(RMat a, RVec b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DimensionMismatch("solve_exact: rhs length");
  for (const auto& row : a)
    if (row.size() != n) throw DimensionMismatch("solve_exact: matrix not square");
  ExactSolve out;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(a[p][c]) == 0) ++p;
    if (p == n) throw InvalidArgument("solve_exact: singular matrix");
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    out.pivots.push_back(a[c][c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || sgn(a[r][c]) == 0) continue;
      Rational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  out.solution.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.solution[i] = b[i] / a[i][i];
  return out;
}

}  // namespace ck
