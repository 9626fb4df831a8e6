#ifndef NZSG_TEST_SUPPORT_HPP
#define NZSG_TEST_SUPPORT_HPP

// Reference instances shared by the unit and acceptance tests.

#include <Eigen/Dense>
#include <random>

#include "nzsg/instances.hpp"
#include "nzsg/saddle.hpp"

namespace nzsg::reference {

// Unconstrained (huge ball) bilinear subproblem with random K of norm k_norm.
struct LinearSaddle {
  SaddleSubproblem sub;
  JointPoint z_star;
};

inline LinearSaddle random_saddle(std::size_t n, double a, double b, double k_norm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < K.size(); ++i) K.data()[i] = nd(rng);
  K *= k_norm / Eigen::JacobiSVD<Eigen::MatrixXd>(K).singularValues()(0);
  Eigen::VectorXd p(n), q(n);
  for (auto& v : p) v = nd(rng);
  for (auto& v : q) v = nd(rng);
  // a x + p + K'y = 0,  b y - q - K x = 0
  Eigen::MatrixXd S(2 * n, 2 * n);
  S << a * Eigen::MatrixXd::Identity(n, n), K.transpose(), -K, b * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs(2 * n);
  rhs << -p, q;
  const Eigen::VectorXd z = S.partialPivLu().solve(rhs);

  std::vector<double> kd(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) kd[i * n + j] = K(i, j);
  LinearSaddle r;
  auto& s = r.sub;
  s.structure = make_bilinear_structure(a, DenseVector(std::vector<double>(p.data(), p.data() + n)), b,
                                        DenseVector(std::vector<double>(q.data(), q.data() + n)),
                                        SparseMatrix::from_dense(n, n, kd));
  s.X = FeasibleSet::ball(DenseVector(n), 1e6);
  s.Y = FeasibleSet::ball(DenseVector(n), 1e6);
  s.center = {DenseVector(n), DenseVector(n)};
  s.lipschitz = s.structure->coupling_norm + std::max(a, b);
  s.modulus = std::min(a, b);
  r.z_star = {DenseVector(std::vector<double>(z.data(), z.data() + n)),
              DenseVector(std::vector<double>(z.data() + n, z.data() + 2 * n))};
  return r;
}

// Zero-sum matrix game plus the linear coupling g = <a, x> + <b, y>.
inline GameSpec linear_coupled(const MatrixGame& mg, const DenseVector& a, const DenseVector& b) {
  GameSpec s = to_game_spec(mg);
  s.grad_u1_x = [f = s.grad_u1_x, a](const JointPoint& z) { return f(z) - a; };
  s.grad_u2_x = [f = s.grad_u2_x, a](const JointPoint& z) { return f(z) - a; };
  s.grad_u1_y = [f = s.grad_u1_y, b](const JointPoint& z) { return f(z) - b; };
  s.grad_u2_y = [f = s.grad_u2_y, b](const JointPoint& z) { return f(z) - b; };
  s.u1 = [f = s.u1, a, b](const JointPoint& z) { return f(z) - dot(a, z.x) - dot(b, z.y); };
  s.u2 = [f = s.u2, a, b](const JointPoint& z) { return f(z) - dot(a, z.x) - dot(b, z.y); };
  s.delta = 0.0;
  s.monotone_modulus = std::min(mg.reg_mu, mg.reg_nu);
  return s;
}

// The equivalent zero-sum game: h' = h + <a, x> - <b, y>.
inline GameSpec folded_zero_sum(const MatrixGame& mg, const DenseVector& a, const DenseVector& b) {
  GameSpec s = to_game_spec(mg);
  s.grad_u1_x = [f = s.grad_u1_x, a](const JointPoint& z) { return f(z) - a; };
  s.grad_u2_x = [f = s.grad_u2_x, a](const JointPoint& z) { return f(z) + a; };
  s.grad_u1_y = [f = s.grad_u1_y, b](const JointPoint& z) { return f(z) + b; };
  s.grad_u2_y = [f = s.grad_u2_y, b](const JointPoint& z) { return f(z) - b; };
  s.u1 = s.u2 = nullptr;
  s.delta = 0.0;
  s.monotone_modulus = std::min(mg.reg_mu, mg.reg_nu);
  return s;
}

}  // namespace nzsg::reference

#endif
