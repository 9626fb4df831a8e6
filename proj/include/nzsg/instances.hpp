#ifndef NZSG_INSTANCES_HPP
#define NZSG_INSTANCES_HPP

// Problem families: regularized matrix games (with transaction fees), their
// convex reformulations, random sparse experiment matrices, synthetic
// quadratic games with a planted equilibrium and the leader-follower
// counterexample.

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nzsg/game.hpp"

namespace nzsg {

// u1 = <A x, y> + R,  u2 = <B x, y> - R,  R = -(reg_mu/2)|x|^2 + (reg_nu/2)|y|^2
// over the simplices of matching dimension. A and B are m x n.
struct MatrixGame {
  SparseMatrix A;
  SparseMatrix B;
  double reg_mu = 0.0;
  double reg_nu = 0.0;

  std::size_t n() const noexcept { return A.cols(); }
  std::size_t m() const noexcept { return A.rows(); }

  void validate() const {
    detail::require_dims(B.rows(), A.rows(), "matrix game rows");
    detail::require_dims(B.cols(), A.cols(), "matrix game cols");
    if (A.rows() == 0 || A.cols() == 0) throw DimensionError("matrix game: empty payoff matrix");
    if (reg_mu < 0.0 || reg_nu < 0.0)
      throw PreconditionError("matrix game: regularizer curvatures must be nonnegative");
  }
};

inline std::pair<SparseMatrix, SparseMatrix> split_pos_neg(const SparseMatrix& M) {
  return {M.map_values([](double v) { return v > 0.0 ? v : 0.0; }),
          M.map_values([](double v) { return v < 0.0 ? -v : 0.0; })};
}

// A = (1-rho) M+ - M-,  B = -M+ + (1-rho) M-.
// Written as v - rho*v so that integer-valued inputs stay exact.
inline std::pair<SparseMatrix, SparseMatrix> apply_transaction_fee(const SparseMatrix& M, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw PreconditionError("transaction fee must lie in [0, 1]");
  SparseMatrix A = M.map_values([rho](double v) { return v > 0.0 ? v - rho * v : v; });
  SparseMatrix B = M.map_values([rho](double v) { return v > 0.0 ? -v : -(v - rho * v); });
  return {std::move(A), std::move(B)};
}

inline MatrixGame fee_game(const SparseMatrix& M, double rho, double mu, double nu) {
  auto [A, B] = apply_transaction_fee(M, rho);
  MatrixGame g{std::move(A), std::move(B), mu, nu};
  g.validate();
  return g;
}

// Upper estimate of |(A + B)/2|_2, the coupling strength of a matrix game.
inline double coupling_strength(const MatrixGame& game) {
  const SparseMatrix S = lincomb(0.5, game.A, 0.5, game.B);
  bool zero = true;
  for (double v : S.values()) zero = zero && v == 0.0;
  return zero ? 0.0 : spectral_norm(S) * (1.0 + kNormSafety);
}

namespace detail {

struct MatrixGameData {
  SparseMatrix A, B;
  double mu, nu;   // regularizer curvatures
  double bx, by;   // curvature removed from u2 in x and from u1 in y
};

inline GameSpec matrix_spec(std::shared_ptr<const MatrixGameData> d, double L) {
  GameSpec s;
  s.X = FeasibleSet::simplex(d->A.cols());
  s.Y = FeasibleSet::simplex(d->A.rows());
  s.L = L;
  s.grad_u1_x = [d](const JointPoint& z) {
    DenseVector r = spmv_transpose(d->A, z.y);
    axpy(-d->mu, z.x, r);
    return r;
  };
  s.grad_u1_y = [d](const JointPoint& z) {
    DenseVector r = spmv(d->A, z.x);
    axpy(d->nu - 2.0 * d->by, z.y, r);
    return r;
  };
  s.grad_u2_x = [d](const JointPoint& z) {
    DenseVector r = spmv_transpose(d->B, z.y);
    axpy(d->mu - 2.0 * d->bx, z.x, r);
    return r;
  };
  s.grad_u2_y = [d](const JointPoint& z) {
    DenseVector r = spmv(d->B, z.x);
    axpy(-d->nu, z.y, r);
    return r;
  };
  s.u1 = [d](const JointPoint& z) {
    return dot(spmv(d->A, z.x), z.y) - 0.5 * d->mu * squared_norm(z.x) +
           (0.5 * d->nu - d->by) * squared_norm(z.y);
  };
  s.u2 = [d](const JointPoint& z) {
    return dot(spmv(d->B, z.x), z.y) + (0.5 * d->mu - d->bx) * squared_norm(z.x) -
           0.5 * d->nu * squared_norm(z.y);
  };
  s.own_curvature_x = d->mu;
  s.own_curvature_y = d->nu;
  // h = -<K x, y> + ((mu - bx)/2)|x|^2 - ((nu - by)/2)|y|^2,  K = (A - B)/2
  s.zero_sum_structure =
      make_bilinear_structure(d->mu - d->bx, DenseVector(d->A.cols()), d->nu - d->by,
                              DenseVector(d->A.rows()), lincomb(-0.5, d->A, 0.5, d->B));
  return s;
}

inline double payoff_smoothness(const MatrixGame& g) {
  auto nrm = [](const SparseMatrix& M) { return M.nnz() == 0 ? 0.0 : spectral_norm(M); };
  return std::max(nrm(g.A), nrm(g.B)) * (1.0 + kNormSafety) + std::max(g.reg_mu, g.reg_nu);
}

}  // namespace detail

// Whole-game view. The strong-monotonicity modulus is reported as
// min(mu, nu)/2 for every fee level so that certificates, and hence
// baseline iteration counts, are comparable across a fee sweep.
inline GameSpec to_game_spec(const MatrixGame& game) {
  game.validate();
  auto d = std::make_shared<const detail::MatrixGameData>(
      detail::MatrixGameData{game.A, game.B, game.reg_mu, game.reg_nu, 0.0, 0.0});
  GameSpec s = detail::matrix_spec(d, detail::payoff_smoothness(game));
  s.name = "matrix-game";
  s.mu = game.reg_mu;
  s.nu = game.reg_nu;
  s.delta = std::min(coupling_strength(game), s.L);
  s.monotone_modulus = 0.5 * std::min(game.reg_mu, game.reg_nu);
  s.validate();
  return s;
}

struct ReformulatedGame {
  MatrixGame base;
  double beta = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  GameSpec spec;
};

// Moves curvature between the players so that the coupling part becomes
// jointly convex while the equilibrium is unchanged.
inline ReformulatedGame reformulate_bilinear(const MatrixGame& game, double beta) {
  game.validate();
  const double mu = game.reg_mu;
  const double nu = game.reg_nu;
  if (!(beta >= 0.0) || beta > 0.5 * std::sqrt(mu * nu) * (1.0 + 1e-12))
    throw PreconditionError("reformulate_bilinear: coupling strength exceeds sqrt(mu*nu)/2");
  double b1 = beta;
  double b2 = beta;
  if (2.0 * beta <= mu && 2.0 * beta <= nu) {
  } else if (mu <= 2.0 * beta) {
    b1 = 0.5 * mu;
    b2 = 2.0 * beta * beta / mu;
  } else {
    b1 = 2.0 * beta * beta / nu;
    b2 = 0.5 * nu;
  }
  auto d = std::make_shared<const detail::MatrixGameData>(
      detail::MatrixGameData{game.A, game.B, mu, nu, b1, b2});
  const double L0 = detail::payoff_smoothness(game);
  GameSpec s = detail::matrix_spec(d, L0 + 2.0 * std::max(b1, b2));
  s.name = "matrix-game-reformulated";
  s.mu = 0.5 * mu;
  s.nu = 0.5 * nu;
  s.delta = beta + std::max(b1, b2);
  s.monotone_modulus = 0.5 * std::min(mu, nu);
  s.validate();
  return {game, beta, b1, b2, std::move(s)};
}

inline ReformulatedGame reformulate_bilinear(const MatrixGame& game) {
  return reformulate_bilinear(game, coupling_strength(game));
}

// u1 -> u1 - beta|y|^2, u2 -> u2 - beta|x|^2 for a beta-smooth coupling part.
inline GameSpec reformulate_general(const GameSpec& game, double beta) {
  if (!(beta >= 0.0) || beta > 0.5 * std::min(game.mu, game.nu) * (1.0 + 1e-12))
    throw PreconditionError("reformulate_general: beta must lie in [0, min(mu, nu)/2]");
  if (beta < game.delta * (1.0 - 1e-12))
    throw PreconditionError("reformulate_general: beta below the coupling smoothness");
  GameSpec s = game;
  s.name = game.name + "-reformulated";
  if (beta > 0.0) {
    s.grad_u1_y = [f = game.grad_u1_y, beta](const JointPoint& z) {
      DenseVector r = f(z);
      axpy(-2.0 * beta, z.y, r);
      return r;
    };
    s.grad_u2_x = [f = game.grad_u2_x, beta](const JointPoint& z) {
      DenseVector r = f(z);
      axpy(-2.0 * beta, z.x, r);
      return r;
    };
    if (game.u1) s.u1 = [f = game.u1, beta](const JointPoint& z) { return f(z) - beta * squared_norm(z.y); };
    if (game.u2) s.u2 = [f = game.u2, beta](const JointPoint& z) { return f(z) - beta * squared_norm(z.x); };
    if (game.zero_sum_structure) {
      auto st = *game.zero_sum_structure;
      st.curv_x -= beta;
      st.curv_y -= beta;
      if (st.curv_x >= 0.0 && st.curv_y >= 0.0)
        s.zero_sum_structure = std::move(st);
      else
        s.zero_sum_structure.reset();
    }
    s.L = game.L + 2.0 * beta;
  }
  s.delta = 2.0 * beta;
  s.mu = 0.5 * game.mu;
  s.nu = 0.5 * game.nu;
  s.monotone_modulus = game.modulus();
  s.validate();
  return s;
}

struct SparseExperiment {
  SparseMatrix M;
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  double mu = 0.0;
  double nu = 0.0;
  bool normalized = false;
  double scale = 1.0;  // factor applied to the raw draws

  MatrixGame game(double rho = 0.0) const { return fee_game(M, rho, mu, nu); }
};

// nnz distinct coordinates drawn uniformly without replacement (sparse
// Fisher-Yates over the virtual index range [0, n*m)), values U[-1, 1].
inline SparseMatrix random_sparse_matrix(std::size_t m, std::size_t n, std::size_t nnz,
                                         std::uint64_t seed) {
  if (n == 0 || m == 0) throw DimensionError("random_sparse_matrix: empty shape");
  const std::uint64_t total = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(m);
  if (nnz > total) throw PreconditionError("random_sparse_matrix: nnz exceeds n*m");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  swapped.reserve(2 * nnz);
  auto slot = [&](std::uint64_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<Triplet> t;
  t.reserve(nnz);
  for (std::uint64_t i = 0; i < nnz; ++i) {
    std::uniform_int_distribution<std::uint64_t> pick(i, total - 1);
    const std::uint64_t j = pick(rng);
    const std::uint64_t at_j = slot(j);
    const std::uint64_t at_i = slot(i);
    swapped[j] = at_i;
    swapped[i] = at_j;
    t.push_back({static_cast<std::size_t>(at_j / n), static_cast<std::size_t>(at_j % n), value(rng)});
  }
  return SparseMatrix::from_triplets(m, n, std::move(t));
}

inline SparseExperiment gen_sparse_experiment(std::size_t n, std::size_t m, std::size_t nnz,
                                              std::uint64_t seed, double mu, double nu,
                                              bool normalize) {
  if (mu < 0.0 || nu < 0.0) throw PreconditionError("gen_sparse_experiment: negative curvature");
  SparseExperiment e;
  e.M = random_sparse_matrix(m, n, nnz, seed);
  e.n = n;
  e.m = m;
  e.seed = seed;
  e.mu = mu;
  e.nu = nu;
  e.normalized = normalize;
  if (normalize && nnz > 0) {
    e.scale = 1.0 / spectral_norm(e.M);
    e.M = e.M.scaled(e.scale);
  }
  return e;
}

// Dense quadratic game with a planted interior equilibrium.
//   g(z) = z'Gz/2 + c'z,  G PSD with |G| = delta
//   h(x, y) = (mu/2)|x|^2 - (nu/2)|y|^2 + <K x, y> + p'x + q'y,  |K| = coupling_norm
struct QuadraticInstance {
  GameSpec spec;
  std::size_t n_x = 0;
  std::size_t n_y = 0;
  std::vector<double> G;  // (n_x+n_y)^2, row-major
  std::vector<double> K;  // n_y x n_x, row-major
  DenseVector c, p, q;
  JointPoint z_star;
  double mu = 0.0, nu = 0.0, delta = 0.0, coupling_norm = 0.0;
};

struct QuadraticOptions {
  double target_scale = 1.0;  // |z*|; 0 gives the symmetric instance with z* = 0
  double linear_scale = 1.0;  // scale of the random coupling-gradient offset c
};

namespace detail {

// Random orthogonal matrix by Gram-Schmidt on Gaussian columns.
inline std::vector<double> random_orthogonal(std::size_t N, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<double> Q(N * N);
  for (std::size_t j = 0; j < N; ++j) {
    for (int attempt = 0;; ++attempt) {
      std::vector<double> v(N);
      for (auto& e : v) e = nd(rng);
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t k = 0; k < j; ++k) {
          double s = 0.0;
          for (std::size_t i = 0; i < N; ++i) s += Q[i * N + k] * v[i];
          for (std::size_t i = 0; i < N; ++i) v[i] -= s * Q[i * N + k];
        }
      double nv = 0.0;
      for (double e : v) nv += e * e;
      nv = std::sqrt(nv);
      if (nv > 1e-8) {
        for (std::size_t i = 0; i < N; ++i) Q[i * N + j] = v[i] / nv;
        break;
      }
      if (attempt > 16) throw std::runtime_error("random_orthogonal: degenerate draw");
    }
  }
  return Q;
}

}  // namespace detail

inline QuadraticInstance make_quadratic_known_ne(std::size_t n_x, std::size_t n_y, double mu, double nu,
                                                 double delta, double coupling_norm, std::uint64_t seed,
                                                 QuadraticOptions opt = {}) {
  if (n_x == 0 || n_y == 0) throw DimensionError("quadratic game: empty dimension");
  if (mu < 0.0 || nu < 0.0 || delta < 0.0 || coupling_norm < 0.0)
    throw PreconditionError("quadratic game: moduli must be nonnegative");
  const std::size_t N = n_x + n_y;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);

  QuadraticInstance q;
  q.n_x = n_x;
  q.n_y = n_y;
  q.mu = mu;
  q.nu = nu;
  q.delta = delta;
  q.coupling_norm = coupling_norm;

  // G = Q diag(lambda) Q', top eigenvalue exactly delta.
  q.G.assign(N * N, 0.0);
  if (delta > 0.0) {
    const auto Q = detail::random_orthogonal(N, rng);
    std::vector<double> lam(N);
    for (auto& l : lam) l = delta * ud(rng);
    lam[0] = delta;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < N; ++k) s += Q[i * N + k] * lam[k] * Q[j * N + k];
        q.G[i * N + j] = s;
      }
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < i; ++j) q.G[i * N + j] = q.G[j * N + i];
  }

  q.K.assign(n_y * n_x, 0.0);
  if (coupling_norm > 0.0) {
    for (auto& e : q.K) e = nd(rng);
    const double kn = spectral_norm(SparseMatrix::from_dense(n_y, n_x, q.K));
    for (auto& e : q.K) e *= coupling_norm / kn;
  }

  DenseVector zs(N);
  if (opt.target_scale > 0.0) {
    for (std::size_t i = 0; i < N; ++i) zs[i] = nd(rng);
    const double nz = norm(zs);
    if (!(nz > 0.0)) throw std::runtime_error("quadratic game: degenerate target");
    zs = (opt.target_scale / nz) * zs;
  }
  q.c = DenseVector(N);
  if (opt.target_scale > 0.0)
    for (std::size_t i = 0; i < N; ++i) q.c[i] = opt.linear_scale * nd(rng);

  const auto Gs = std::make_shared<const SparseMatrix>(SparseMatrix::from_dense(N, N, q.G));
  const auto Ks = std::make_shared<const SparseMatrix>(SparseMatrix::from_dense(n_y, n_x, q.K));

  DenseVector xs(std::vector<double>(zs.begin(), zs.begin() + static_cast<std::ptrdiff_t>(n_x)));
  DenseVector ys(std::vector<double>(zs.begin() + static_cast<std::ptrdiff_t>(n_x), zs.end()));
  const DenseVector gz = spmv(*Gs, zs) + q.c;
  q.p = DenseVector(n_x);
  q.q = DenseVector(n_y);
  {
    const DenseVector kty = spmv_transpose(*Ks, ys);
    const DenseVector kx = spmv(*Ks, xs);
    for (std::size_t i = 0; i < n_x; ++i) q.p[i] = -gz[i] - mu * xs[i] - kty[i];
    for (std::size_t j = 0; j < n_y; ++j) q.q[j] = gz[n_x + j] + nu * ys[j] - kx[j];
  }
  q.z_star = {xs, ys};

  struct Data {
    std::shared_ptr<const SparseMatrix> G, K;
    DenseVector c, p, q;
    double mu, nu;
    std::size_t n_x;
  };
  auto d = std::make_shared<const Data>(Data{Gs, Ks, q.c, q.p, q.q, mu, nu, n_x});

  auto grad_g_joint = [d](const JointPoint& z) {
    std::vector<double> zz(z.x.begin(), z.x.end());
    zz.insert(zz.end(), z.y.begin(), z.y.end());
    DenseVector r = spmv(*d->G, DenseVector(std::move(zz))) + d->c;
    DenseVector rx(std::vector<double>(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(d->n_x)));
    DenseVector ry(std::vector<double>(r.begin() + static_cast<std::ptrdiff_t>(d->n_x), r.end()));
    return JointPoint{std::move(rx), std::move(ry)};
  };
  auto hx = [d](const JointPoint& z) {
    DenseVector r = spmv_transpose(*d->K, z.y) + d->p;
    axpy(d->mu, z.x, r);
    return r;
  };
  auto hy = [d](const JointPoint& z) {
    DenseVector r = spmv(*d->K, z.x) + d->q;
    axpy(-d->nu, z.y, r);
    return r;
  };
  auto gval = [d](const JointPoint& z) {
    std::vector<double> zz(z.x.begin(), z.x.end());
    zz.insert(zz.end(), z.y.begin(), z.y.end());
    const DenseVector v(std::move(zz));
    return 0.5 * dot(spmv(*d->G, v), v) + dot(d->c, v);
  };
  auto hval = [d](const JointPoint& z) {
    return 0.5 * d->mu * squared_norm(z.x) - 0.5 * d->nu * squared_norm(z.y) + dot(spmv(*d->K, z.x), z.y) +
           dot(d->p, z.x) + dot(d->q, z.y);
  };

  GameSpec& s = q.spec;
  s.name = "quadratic";
  s.grad_u1_x = [grad_g_joint, hx](const JointPoint& z) { return -(grad_g_joint(z).x + hx(z)); };
  s.grad_u1_y = [grad_g_joint, hy](const JointPoint& z) { return -(grad_g_joint(z).y + hy(z)); };
  s.grad_u2_x = [grad_g_joint, hx](const JointPoint& z) { return hx(z) - grad_g_joint(z).x; };
  s.grad_u2_y = [grad_g_joint, hy](const JointPoint& z) { return hy(z) - grad_g_joint(z).y; };
  s.u1 = [gval, hval](const JointPoint& z) { return -gval(z) - hval(z); };
  s.u2 = [gval, hval](const JointPoint& z) { return -gval(z) + hval(z); };
  s.mu = mu;
  s.nu = nu;
  s.delta = delta;
  s.L = std::max(delta + std::max(mu, nu) + coupling_norm, 1e-300);
  const double radius = opt.target_scale > 0.0 ? 10.0 * norm(zs) : 1.0;
  s.X = FeasibleSet::ball(DenseVector(n_x), radius);
  s.Y = FeasibleSet::ball(DenseVector(n_y), radius);
  s.known_ne = q.z_star;
  s.zero_sum_structure = make_bilinear_structure(mu, q.p, nu, q.q, *Ks);
  s.validate();
  return q;
}

inline GameSpec gen_quadratic_known_ne(std::size_t n_x, std::size_t n_y, double mu, double nu, double delta,
                                       double coupling_norm, std::uint64_t seed) {
  return make_quadratic_known_ne(n_x, n_y, mu, nu, delta, coupling_norm, seed).spec;
}

// Leader-follower counterexample: X = [0,1] x [1,2], Y = [-1, 0],
//   u1 = -(x1-1)^2/2 - (x2-1)^2/2 + x1 y/2,   u2 = x2 y/2 - (y+1)^2.
inline GameSpec stackelberg_example() {
  GameSpec s;
  s.name = "stackelberg";
  s.X = FeasibleSet::box({0.0, 1.0}, {1.0, 2.0});
  s.Y = FeasibleSet::box({-1.0}, {0.0});
  s.grad_u1_x = [](const JointPoint& z) {
    return DenseVector{-(z.x[0] - 1.0) + 0.5 * z.y[0], -(z.x[1] - 1.0)};
  };
  s.grad_u1_y = [](const JointPoint& z) { return DenseVector{0.5 * z.x[0]}; };
  s.grad_u2_x = [](const JointPoint& z) { return DenseVector{0.0, 0.5 * z.y[0]}; };
  s.grad_u2_y = [](const JointPoint& z) { return DenseVector{0.5 * z.x[1] - 2.0 * (z.y[0] + 1.0)}; };
  s.u1 = [](const JointPoint& z) {
    const double a = z.x[0] - 1.0, b = z.x[1] - 1.0;
    return -0.5 * a * a - 0.5 * b * b + 0.5 * z.x[0] * z.y[0];
  };
  s.u2 = [](const JointPoint& z) {
    const double e = z.y[0] + 1.0;
    return 0.5 * z.x[1] * z.y[0] - e * e;
  };
  // h = |x|^2/4 - (x1+x2)/2 - y^2/2 - y + (-x1 + x2) y/4 + const
  s.mu = 0.5;
  s.nu = 1.0;
  s.delta = (3.0 + std::sqrt(3.0)) / 4.0;  // top eigenvalue of the Hessian of g
  s.L = (2.0 + std::sqrt(5.0)) / 2.0;      // max Hessian norm of u1, u2
  s.own_curvature_x = 1.0;
  s.own_curvature_y = 2.0;
  s.zero_sum_structure = make_bilinear_structure(0.5, DenseVector{-0.5, -0.5}, 1.0, DenseVector{-1.0},
                                                 SparseMatrix::from_dense({{-0.25, 0.25}}));
  s.known_ne = JointPoint{DenseVector{5.0 / 8.0, 1.0}, DenseVector{-0.75}};
  s.validate();
  return s;
}

// Matching pennies: A = [[1,-1],[-1,1]], B = -A, no regularization.
inline MatrixGame matching_pennies() {
  SparseMatrix A = SparseMatrix::from_dense({{1.0, -1.0}, {-1.0, 1.0}});
  return {A, A.scaled(-1.0), 0.0, 0.0};
}

}  // namespace nzsg

#endif
