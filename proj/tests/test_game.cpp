#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nzsg/game.hpp"
#include "nzsg/instances.hpp"

using namespace nzsg;

namespace {

GameSpec worked_fee_game() {
  const auto M = SparseMatrix::from_dense({{300.0, -200.0}, {-100.0, 400.0}});
  return to_game_spec(fee_game(M, 0.01, 0.0, 0.0));
}

// Zero-sum quadratic: u1 = -h, u2 = h with h = (mu/2)|x|^2 - (nu/2)|y|^2 + <Kx, y> + linear.
GameSpec zero_sum_quadratic(double mu, double nu) {
  QuadraticOptions opt;
  opt.linear_scale = 0.0;
  return make_quadratic_known_ne(3, 4, mu, nu, 0.0, 0.7, 17, opt).spec;
}

JointPoint fd_grad(const ValueOracle& f, const JointPoint& z, double h = 1e-5) {
  JointPoint g{DenseVector(z.x.size()), DenseVector(z.y.size())};
  for (std::size_t i = 0; i < z.x.size(); ++i) {
    JointPoint a = z, b = z;
    a.x[i] += h;
    b.x[i] -= h;
    g.x[i] = (f(a) - f(b)) / (2 * h);
  }
  for (std::size_t j = 0; j < z.y.size(); ++j) {
    JointPoint a = z, b = z;
    a.y[j] += h;
    b.y[j] -= h;
    g.y[j] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

double rel_err(const JointPoint& a, const JointPoint& b) {
  return norm(a - b) / std::max(1.0, norm(b));
}

}  // namespace

TEST(GradG, ZeroSumIsZero) {
  const auto g = zero_sum_quadratic(1.0, 1.0);
  std::mt19937_64 rng(1);
  const auto z = sample_point(g, rng);
  const auto d = grad_g(g, z);
  EXPECT_LE(std::max(max_abs(d.x), max_abs(d.y)), 1e-15);
}

TEST(GradG, FeeGameByHand) {
  const auto g = worked_fee_game();
  QueryLedger L;
  const auto d = grad_g(g, {DenseVector{1.0, 0.0}, DenseVector{1.0, 0.0}}, &L);
  EXPECT_EQ(d.x, (DenseVector{1.5, 1.0}));
  EXPECT_EQ(d.y, (DenseVector{1.5, 0.5}));
  EXPECT_EQ(L.g_queries, 1);
}

TEST(GradG, FiniteDifferences) {
  const auto g = gen_quadratic_known_ne(4, 3, 0.5, 0.8, 0.9, 1.2, 3);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    const auto z = sample_point(g, rng);
    EXPECT_LE(rel_err(grad_g(g, z), fd_grad([&](const JointPoint& w) { return value_g(g, w); }, z)), 1e-5);
  }
}

TEST(OperatorH, BilinearForm) {
  // h = <Kx, y>: u1 = -h, u2 = h.
  const auto K = SparseMatrix::from_dense({{1.0, 2.0}, {0.0, -1.0}, {3.0, 0.5}});
  GameSpec g;
  g.X = FeasibleSet::ball(DenseVector(2), 1.0);
  g.Y = FeasibleSet::ball(DenseVector(3), 1.0);
  g.L = 5.0;
  g.grad_u1_x = [K](const JointPoint& z) { return -spmv_transpose(K, z.y); };
  g.grad_u1_y = [K](const JointPoint& z) { return -spmv(K, z.x); };
  g.grad_u2_x = [K](const JointPoint& z) { return spmv_transpose(K, z.y); };
  g.grad_u2_y = [K](const JointPoint& z) { return spmv(K, z.x); };
  const JointPoint z{DenseVector{0.3, -0.2}, DenseVector{0.1, 0.4, -0.5}};
  QueryLedger L;
  const auto H = operator_H(g, z, &L);
  EXPECT_LE(max_abs_diff(H.x, spmv_transpose(K, z.y)), 1e-15);
  EXPECT_LE(max_abs_diff(H.y, -spmv(K, z.x)), 1e-15);
  EXPECT_EQ(L.h_queries, 1);
  EXPECT_EQ(operator_F(g, z), H);  // zero-sum: F = H
}

TEST(OperatorF, VanishesAtPlantedEquilibrium) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto g = gen_quadratic_known_ne(5, 4, 0.3 + 0.01 * s, 0.6, 0.4, 1.1, s);
    const auto F = operator_F(g, *g.known_ne);
    ASSERT_LE(std::max(max_abs(F.x), max_abs(F.y)), 1e-10) << "seed " << s;
  }
}

TEST(OperatorF, DecompositionIdentity) {
  auto g = gen_quadratic_known_ne(6, 5, 0.4, 0.7, 1.3, 0.9, 8);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const auto z = sample_point(g, rng);
    const auto F = operator_F(g, z);
    ASSERT_LE(max_abs_diff(F, grad_g(g, z) + operator_H(g, z)), 1e-12 * std::max(1.0, max_abs(F.x)));
    // u1 = -g - h, u2 = -g + h at the gradient level
    const auto G = grad_g(g, z), H = operator_H(g, z);
    ASSERT_LE(max_abs_diff(g.grad_u1_x(z), -G.x - H.x), 1e-12 * std::max(1.0, max_abs(G.x)));
    ASSERT_LE(max_abs_diff(g.grad_u2_y(z), -G.y - H.y), 1e-12 * std::max(1.0, max_abs(G.y)));
  }
  g.cross_check = true;
  QueryLedger L;
  EXPECT_NO_THROW(operator_F(g, sample_point(g, rng), &L));
  EXPECT_EQ(L.f_queries, 1);
}

TEST(OperatorF, CrossCheckHoldsForArbitraryOracles) {
  // g and H are derived from the same four partials, so even a perturbed
  // oracle keeps the split consistent.
  auto g = zero_sum_quadratic(1.0, 1.0);
  g.cross_check = true;
  g.grad_u2_x = [f = g.grad_u2_x](const JointPoint& z) { return f(z) + DenseVector(z.x.size(), 1e-3); };
  EXPECT_NO_THROW(operator_F(g, *g.known_ne));
}

TEST(ProbeStructure, StronglyMonotoneQuadratic) {
  const auto g = zero_sum_quadratic(1.0, 1.0);
  const auto r = probe_structure(g, 200, 9);
  EXPECT_EQ(r.pairs, 200);
  EXPECT_GE(r.monotonicity, 1.0 - 1e-9);
  EXPECT_LE(r.coupling_smoothness, 1e-12);  // g == 0
}

TEST(ProbeStructure, LinearCouplingHasZeroDelta) {
  auto g = zero_sum_quadratic(0.5, 0.5);
  // add a constant vector to both players' gradients: g becomes linear
  g.grad_u1_x = [f = g.grad_u1_x](const JointPoint& z) { return f(z) + DenseVector(z.x.size(), 0.3); };
  g.grad_u2_y = [f = g.grad_u2_y](const JointPoint& z) { return f(z) + DenseVector(z.y.size(), -0.2); };
  EXPECT_LE(probe_structure(g, 100, 1).coupling_smoothness, 1e-12);
}

TEST(ProbeStructure, DeclaredModuliHold) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const double mu = 0.2 + 0.1 * s, nu = 1.0, delta = 0.5;
    const auto g = gen_quadratic_known_ne(4, 4, mu, nu, delta, 1.0, s);
    const auto r = probe_structure(g, 200, s);
    EXPECT_GE(r.monotonicity, std::min(mu, nu) - 1e-9);
    EXPECT_GE(r.coupling_convexity, -1e-9);
    EXPECT_LE(r.coupling_smoothness, delta + 1e-9);
  }
}

TEST(GameSpec, ValidateRejectsBadConstants) {
  auto g = zero_sum_quadratic(1.0, 1.0);
  EXPECT_NO_THROW(g.validate());
  auto bad = g;
  bad.mu = 2.0 * g.L;
  EXPECT_THROW(bad.validate(), PreconditionError);
  bad = g;
  bad.delta = -1.0;
  EXPECT_THROW(bad.validate(), PreconditionError);
  bad = g;
  bad.known_ne = JointPoint{DenseVector(3, 1e6), DenseVector(4)};
  EXPECT_THROW(bad.validate(), PreconditionError);
  bad = g;
  bad.grad_u1_x = nullptr;
  EXPECT_THROW(bad.validate(), PreconditionError);
}

TEST(QueryLedger, Totals) {
  QueryLedger a{1, 2, 3, 4}, b{10, 20, 30, 40};
  a += b;
  EXPECT_EQ(a.total(), 110);
  EXPECT_EQ(a, (QueryLedger{11, 22, 33, 44}));
}
