#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nzsg/sets.hpp"

using namespace nzsg;

namespace {

std::vector<FeasibleSet> zoo() {
  return {FeasibleSet::simplex(1),
          FeasibleSet::simplex(5),
          FeasibleSet::ball(DenseVector{0.5, -1.0, 2.0}, 1.5),
          FeasibleSet::box(DenseVector{0.0, -1.0, 2.0}, DenseVector{1.0, 1.0, 2.0}),
          FeasibleSet::product({FeasibleSet::simplex(3), FeasibleSet::ball(DenseVector(2), 2.0)})};
}

DenseVector gaussian(std::size_t n, std::mt19937_64& rng, double scale = 3.0) {
  std::normal_distribution<double> nd(0.0, scale);
  DenseVector v(n);
  for (auto& e : v) e = nd(rng);
  return v;
}

// Brute-force projection onto the 2-simplex over a fine grid.
DenseVector grid_project_simplex2(const DenseVector& v) {
  double best = INFINITY, bt = 0.0;
  for (int k = 0; k <= 100000; ++k) {
    const double t = k / 100000.0;
    const double d = (t - v[0]) * (t - v[0]) + (1 - t - v[1]) * (1 - t - v[1]);
    if (d < best) best = d, bt = t;
  }
  return {bt, 1.0 - bt};
}

}  // namespace

TEST(Project, Examples) {
  const auto S2 = FeasibleSet::simplex(2);
  EXPECT_EQ(project(S2, DenseVector{0.5, 0.5}), (DenseVector{0.5, 0.5}));
  EXPECT_EQ(project(S2, DenseVector{2.0, 0.0}), (DenseVector{1.0, 0.0}));
  const auto B = FeasibleSet::ball(DenseVector(2), 1.0);
  const auto p = project(B, DenseVector{3.0, 4.0});
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-15);
}

TEST(Project, SimplexMatchesGrid) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const auto v = gaussian(2, rng);
    EXPECT_LE(max_abs_diff(project(FeasibleSet::simplex(2), v), grid_project_simplex2(v)), 1e-5);
  }
}

TEST(Project, FeasibleIdempotentNonexpansive) {
  std::mt19937_64 rng(11);
  for (const auto& S : zoo()) {
    for (int k = 0; k < 1000; ++k) {
      const auto v = gaussian(S.dim(), rng), w = gaussian(S.dim(), rng);
      const auto pv = project(S, v), pw = project(S, w);
      ASSERT_TRUE(contains(S, pv, 1e-12));
      ASSERT_EQ(project(S, pv), pv);
      ASSERT_LE(norm(pv - pw), norm(v - w) * (1.0 + 1e-12) + 1e-15);
    }
  }
}

TEST(Project, DimensionMismatch) {
  EXPECT_THROW(project(FeasibleSet::simplex(3), DenseVector(2)), DimensionError);
  EXPECT_THROW(lmo(FeasibleSet::simplex(3), DenseVector(2)), DimensionError);
}

TEST(Lmo, Examples) {
  EXPECT_EQ(lmo(FeasibleSet::simplex(2), DenseVector{1.0, 2.0}), (DenseVector{1.0, 0.0}));
  const double r = 2.5;
  const DenseVector c{1.0, -2.0, 2.0};
  const auto w = lmo(FeasibleSet::ball(DenseVector(3), r), c);
  const auto ref = (-r / norm(c)) * c;
  EXPECT_LE(max_abs_diff(w, ref), 1e-15);
  EXPECT_EQ(lmo(FeasibleSet::box(DenseVector{0.0, 0.0}, DenseVector{1.0, 2.0}), DenseVector{-1.0, 3.0}),
            (DenseVector{1.0, 0.0}));
}

TEST(Lmo, TiesGoToLowestIndex) {
  EXPECT_EQ(lmo(FeasibleSet::simplex(3), DenseVector{2.0, 1.0, 1.0}), (DenseVector{0.0, 1.0, 0.0}));
}

TEST(Lmo, Optimal) {
  std::mt19937_64 rng(5);
  for (const auto& S : zoo()) {
    const auto c = gaussian(S.dim(), rng, 1.0);
    const auto w = lmo(S, c);
    ASSERT_TRUE(contains(S, w, 1e-12));
    for (int k = 0; k < 1000; ++k) ASSERT_LE(dot(c, w), dot(c, sample_point(S, rng)) + 1e-12);
  }
}

TEST(Lmo, GapNonnegativeAndZeroAtMinimizer) {
  std::mt19937_64 rng(6);
  for (const auto& S : zoo()) {
    const auto c = gaussian(S.dim(), rng, 1.0);
    EXPECT_NEAR(lmo_gap(S, c, lmo(S, c)), 0.0, 1e-12);
    for (int k = 0; k < 100; ++k) EXPECT_GE(lmo_gap(S, c, sample_point(S, rng)), -1e-12);
  }
}

TEST(Diameter, Examples) {
  EXPECT_DOUBLE_EQ(diameter(FeasibleSet::ball(DenseVector(4), 1.5)), 3.0);
  EXPECT_DOUBLE_EQ(diameter(FeasibleSet::simplex(7)), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(diameter(FeasibleSet::simplex(1)), 0.0);
  EXPECT_DOUBLE_EQ(diameter(FeasibleSet::product({FeasibleSet::simplex(4), FeasibleSet::simplex(9)})), 2.0);
  EXPECT_DOUBLE_EQ(squared_diameter(FeasibleSet::box(DenseVector{0.0, 1.0}, DenseVector{1.0, 2.0})), 2.0);
}

TEST(Sets, InvalidConstruction) {
  EXPECT_THROW(FeasibleSet::simplex(0), std::invalid_argument);
  EXPECT_THROW(FeasibleSet::ball(DenseVector(2), 0.0), std::invalid_argument);
  EXPECT_THROW(FeasibleSet::box(DenseVector{1.0}, DenseVector{0.0}), std::invalid_argument);
}

TEST(Sets, InitialPointFeasible) {
  for (const auto& S : zoo()) EXPECT_TRUE(contains(S, initial_point(S)));
  EXPECT_EQ(initial_point(FeasibleSet::simplex(4)), (DenseVector{0.25, 0.25, 0.25, 0.25}));
}
