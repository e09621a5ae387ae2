#include <gtest/gtest.h>

#include "support.hpp"

using namespace cktest;
using ck::MultiIndex;

namespace {

MultiIndex mi(std::vector<unsigned> e) { return MultiIndex(std::move(e)); }

// Multinomial by repeated binomials, independent of the factorial formula.
Rational multinomial_oracle(const std::vector<unsigned>& j) {
  Rational out = 1;
  unsigned total = 0;
  for (unsigned x : j) {
    for (unsigned i = 1; i <= x; ++i) out = out * (total + i) / i;
    total += x;
  }
  return out;
}

std::vector<Polytope> random_bodies(Rng& rng, std::size_t k, std::size_t n) {
  std::vector<Polytope> out;
  std::uniform_int_distribution<std::size_t> count(1, n + 3);
  for (std::size_t j = 0; j < k; ++j) out.push_back(ck::hull(random_points(rng, count(rng), n, -2, 2, 2), n));
  return out;
}

}  // namespace

TEST(MultiIndex, Basics) {
  EXPECT_THROW(MultiIndex(std::vector<unsigned>{}), ck::InvalidArgument);
  const auto I = mi({2, 1, 1});
  EXPECT_EQ(I.degree(), 4u);
  EXPECT_EQ(I.str(), "(2,1,1)");
}

TEST(Multinomial, Examples) {
  EXPECT_EQ(ck::multinomial(mi({3, 0, 0})), 1);
  EXPECT_EQ(ck::multinomial(mi({1, 1})), 2);
  EXPECT_EQ(ck::multinomial(mi({2, 1, 1})), 12);
  for (const auto& J : ck::simplex_indices(4, 5)) EXPECT_EQ(Rational(ck::multinomial(J)), multinomial_oracle(J.entries()));
}

TEST(SimplexIndices, CountAndOrder) {
  for (std::size_t k = 1; k <= 4; ++k)
    for (unsigned n = 1; n <= 4; ++n) {
      const auto idx = ck::simplex_indices(k, n);
      Rational expected = multinomial_oracle({n, static_cast<unsigned>(k - 1)});
      EXPECT_EQ(Rational(static_cast<unsigned long>(idx.size())), expected);
      for (std::size_t i = 1; i < idx.size(); ++i) EXPECT_GT(idx[i - 1], idx[i]);
      for (const auto& I : idx) EXPECT_EQ(I.degree(), n);
    }
}

TEST(InterpMatrix, Examples) {
  for (unsigned n = 1; n <= 4; ++n) {
    const auto A = ck::interp_matrix(1, n);
    ASSERT_EQ(A.size(), 1u);
    EXPECT_EQ(A[0][0], ck::pow(Rational(n), n));
  }
  EXPECT_EQ(ck::interp_matrix(2, 1), (RMat{rv({1, 0}), rv({0, 1})}));
  EXPECT_EQ(ck::interp_matrix(2, 2), (RMat{rv({4, 0, 0}), rv({1, 2, 1}), rv({0, 0, 4})}));
}

TEST(InterpMatrix, NonsingularUpToFourByFour) {
  for (std::size_t k = 1; k <= 4; ++k)
    for (unsigned n = 1; n <= 4; ++n) {
      const auto A = ck::interp_matrix(k, n);
      EXPECT_EQ(ck::rank(A, A.size()), A.size()) << "k=" << k << " n=" << n;
    }
}

TEST(InterpMatrix, Guard) { EXPECT_THROW(ck::interp_matrix(6, 6), ck::ResourceGuard); }

TEST(MixedVolumes, Examples) {
  EXPECT_EQ(ck::mixed_volumes({box(2)}).at({2}), 1);
  const auto seg = ck::mixed_volumes({segment(2, 0), segment(2, 1)});
  EXPECT_EQ(seg.at({2, 0}), 0);
  EXPECT_EQ(seg.at({1, 1}), Rational(1, 2));
  EXPECT_EQ(seg.at({0, 2}), 0);
  EXPECT_EQ(ck::mixed_volumes({box(2), box(2)}).at({1, 1}), 1);
  EXPECT_THROW(ck::mixed_volumes({box(2), box(3)}), ck::DimensionMismatch);
}

TEST(MixedVolumes, PolarizationIdentity) {
  Rng rng(61);
  for (int i = 0; i < 20; ++i) {
    const Polytope a = random_polytope(rng, 2, 5), b = random_polytope(rng, 2, 5);
    const auto t = ck::mixed_volumes({a, b});
    const Rational pol = (shoelace_area(extreme_points_brute([&] {
                            std::vector<RVec> s;
                            for (const auto& u : a.vertices())
                              for (const auto& v : b.vertices()) s.push_back(ck::operator+(u, v));
                            return s;
                          }())) -
                          shoelace_area(a.vertices()) - shoelace_area(b.vertices())) /
                         2;
    EXPECT_EQ(t.at({1, 1}), pol);
    EXPECT_EQ(t.at({2, 0}), shoelace_area(a.vertices()));
  }
}

TEST(MixedVolumes, SquareTriangleMatchesGridFit) {
  const Polytope sq = box(2), tri = standard_simplex(2);
  // vol(t1 Y1 + t2 Y2) = c20 t1^2 + c11 t1 t2 + c02 t2^2, fitted on a 4x4 grid.
  RMat rows;
  RVec rhs;
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) {
      const Rational t1(i, 2), t2(j, 3);
      rows.push_back({t1 * t1, t1 * t2, t2 * t2});
      rhs.push_back(planar_sum_area(sq, t1, tri, t2));
    }
  const auto c = solve_any(rows, rhs);
  ASSERT_TRUE(c.has_value());
  const auto table = ck::mixed_volumes({sq, tri});
  EXPECT_EQ(table.at({2, 0}), (*c)[0]);
  EXPECT_EQ(2 * table.at({1, 1}), (*c)[1]);
  EXPECT_EQ(table.at({0, 2}), (*c)[2]);
  for (const auto& chk : ck::af_midpoint_checks(table)) EXPECT_GT(chk.margin, 0);
  for (const auto& lb : ck::lower_bound_check(table))
    if (lb.index == mi({1, 1})) EXPECT_GT(lb.margin, 0);
}

TEST(MixedVolumes, PolynomialReproducesCombinationVolumes) {
  Rng rng(62);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 2 + trial % 2, k = 2 + trial % 2;
    const auto bodies = random_bodies(rng, k, n);
    const auto table = ck::mixed_volumes(bodies);
    for (int s = 0; s < 3; ++s) {
      const RVec t = random_point(rng, k, 0, 2, 3);
      std::optional<Polytope> sum;
      for (std::size_t j = 0; j < k; ++j) {
        const Polytope term = ck::scale(bodies[j], t[j]);
        sum = sum ? ck::minkowski_sum(*sum, term) : term;
      }
      EXPECT_EQ(table.polynomial(t), ck::volume(*sum));
    }
  }
}

TEST(MixedVolumes, SymmetryScalingTranslation) {
  Rng rng(63);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = 2 + trial % 2;
    const auto bodies = random_bodies(rng, 3, n);
    const auto table = ck::mixed_volumes(bodies);

    const auto swapped = ck::mixed_volumes({bodies[2], bodies[0], bodies[1]});
    for (const auto& [I, v] : table.values()) EXPECT_EQ(swapped.at({I[2], I[0], I[1]}), v);

    const Rational t = random_rational(rng, 0, 3, 4);
    const auto scaled = ck::mixed_volumes({ck::scale(bodies[0], t), bodies[1], bodies[2]});
    for (const auto& [I, v] : table.values()) EXPECT_EQ(scaled.at(I), v * ck::pow(t, I[0]));

    const auto moved = ck::mixed_volumes({bodies[0], ck::translate(bodies[1], random_point(rng, n)), bodies[2]});
    EXPECT_EQ(moved, table);
  }
}

TEST(MixedVolumes, NonnegativeAndDiagonalIsVolume) {
  Rng rng(64);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 3, k = 1 + (trial / 3) % 3;
    const auto bodies = random_bodies(rng, k, n);
    const auto table = ck::mixed_volumes(bodies);
    for (const auto& [I, v] : table.values()) EXPECT_GE(v, 0) << I.str();
    for (std::size_t j = 0; j < k; ++j) EXPECT_EQ(table.body_volume(j), ck::volume(bodies[j]));
  }
}

TEST(MixedVolumes, WorkersGiveIdenticalTables) {
  Rng rng(65);
  const auto bodies = random_bodies(rng, 3, 3);
  EXPECT_EQ(ck::mixed_volumes(bodies, 1), ck::mixed_volumes(bodies, 4));
}

TEST(Table, ValidatesCompleteness) {
  std::map<MultiIndex, Rational> v{{mi({2, 0}), 1}, {mi({1, 1}), 1}};
  EXPECT_THROW(ck::MixedVolumeTable(2, 2, v), ck::InvalidArgument);
  v[mi({0, 2})] = 1;
  EXPECT_NO_THROW(ck::MixedVolumeTable(2, 2, v));
  v[mi({3, 0})] = 1;
  EXPECT_THROW(ck::MixedVolumeTable(2, 2, v), ck::InvalidArgument);
}

TEST(AfMidpoint, Examples) {
  const ck::MixedVolumeTable t(2, 2, {{mi({2, 0}), 1}, {mi({1, 1}), Rational(1, 2)}, {mi({0, 2}), 0}});
  const auto checks = ck::af_midpoint_checks(t);
  ASSERT_EQ(checks.size(), 1u);
  EXPECT_EQ(checks[0].margin, Rational(1, 4));
  EXPECT_TRUE(checks[0].vacuous);
  EXPECT_TRUE(checks[0].holds());
  EXPECT_TRUE(ck::af_midpoint_checks(ck::mixed_volumes({box(3)})).empty());
}

TEST(AfMidpoint, HoldsOnRandomTriplesAndPairs) {
  Rng rng(66);
  for (int trial = 0; trial < 10; ++trial) {
    for (const auto& [k, n] : {std::pair{3u, 2u}, std::pair{2u, 3u}}) {
      const auto table = ck::mixed_volumes(random_bodies(rng, k, n));
      for (const auto& c : ck::af_midpoint_checks(table))
        EXPECT_TRUE(c.holds()) << c.minus.str() << " " << c.centre.str() << " " << c.plus.str();
    }
  }
}

TEST(LowerBound, Examples) {
  const auto seg = ck::mixed_volumes({segment(2, 0), segment(2, 1)});
  for (const auto& c : ck::lower_bound_check(seg)) {
    EXPECT_TRUE(c.holds());
    if (c.index == mi({1, 1})) EXPECT_EQ(c.margin, Rational(1, 4));
    else EXPECT_EQ(c.margin, 0);
  }
  Rng rng(67);
  for (int trial = 0; trial < 10; ++trial)
    for (const auto& c : ck::lower_bound_check(ck::mixed_volumes(random_bodies(rng, 2, 2)))) EXPECT_TRUE(c.holds());
}

TEST(Bmi, Examples) {
  const auto same = ck::bmi_check(box(2), box(2));
  EXPECT_TRUE(same.binomial_exact);
  EXPECT_TRUE(same.homothetic);
  EXPECT_NEAR(same.lhs, 2.0, 1e-15);
  EXPECT_TRUE(same.equality);

  const auto seg = ck::bmi_check(box(2), segment(2, 0));
  EXPECT_EQ(seg.vol_sum, 2);
  EXPECT_NEAR(seg.lhs, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(seg.rhs, 1.0, 1e-15);
  EXPECT_TRUE(seg.holds);
  EXPECT_FALSE(seg.homothetic);

  const auto dbl = ck::bmi_check(box(2), box(2, 2));
  EXPECT_EQ(dbl.vol_sum, 9);
  EXPECT_NEAR(dbl.lhs, 3.0, 1e-15);
  EXPECT_TRUE(dbl.equality);
  EXPECT_THROW(ck::bmi_check(box(2), box(3)), ck::DimensionMismatch);
}

TEST(Bmi, RandomPairsAndHomothets) {
  Rng rng(68);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 2;
    const Polytope a = random_polytope(rng, n, n + 3), b = random_polytope(rng, n, n + 3);
    const auto r = ck::bmi_check(a, b);
    EXPECT_TRUE(r.binomial_exact);
    EXPECT_TRUE(r.holds);
    const Polytope h = ck::translate(ck::scale(a, random_rational(rng, 1, 3, 3)), random_point(rng, n));
    const auto e = ck::bmi_check(a, h);
    EXPECT_TRUE(e.homothetic);
    EXPECT_LE(std::abs(e.margin), 1e-12);
  }
}

TEST(LogConcavity, Examples) {
  const auto flat = ck::minkowski_logconcavity(box(2), box(2), 4);
  for (const auto& v : flat.volumes) EXPECT_EQ(v, 1);
  for (const auto& c : flat.checks) EXPECT_EQ(c.margin, 0);

  const auto seg = ck::minkowski_logconcavity(box(2), segment(2, 0), 6);
  for (const auto& c : seg.checks) EXPECT_TRUE(c.holds());

  const auto grow = ck::minkowski_logconcavity(box(2), box(2, 2), 5);
  for (std::size_t i = 0; i < grow.t.size(); ++i) EXPECT_EQ(grow.volumes[i], (1 + grow.t[i]) * (1 + grow.t[i]));
  for (const auto& c : grow.checks) EXPECT_TRUE(c.holds());
  EXPECT_THROW(ck::minkowski_logconcavity(box(2), box(2), 2), ck::InvalidArgument);
}
