#ifndef NZSG_GAME_HPP
#define NZSG_GAME_HPP

// Two-player game description and the coupling / zero-sum split.
//
//   g = -(u1 + u2) / 2     coupling part
//   h = (-u1 + u2) / 2     zero-sum part
//   F = -(d_x u1, d_y u2) = grad g + H,   H = (d_x h, -d_y h)

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "nzsg/sets.hpp"
#include "nzsg/vecmat.hpp"

namespace nzsg {

struct JointPoint {
  DenseVector x;
  DenseVector y;

  bool operator==(const JointPoint&) const = default;
};

inline double dot(const JointPoint& a, const JointPoint& b) { return dot(a.x, b.x) + dot(a.y, b.y); }
inline double squared_norm(const JointPoint& a) { return squared_norm(a.x) + squared_norm(a.y); }
inline double norm(const JointPoint& a) { return std::sqrt(squared_norm(a)); }
inline double squared_distance(const JointPoint& a, const JointPoint& b) {
  return squared_distance(a.x, b.x) + squared_distance(a.y, b.y);
}
inline double distance(const JointPoint& a, const JointPoint& b) { return std::sqrt(squared_distance(a, b)); }
inline JointPoint operator+(const JointPoint& a, const JointPoint& b) { return {a.x + b.x, a.y + b.y}; }
inline JointPoint operator-(const JointPoint& a, const JointPoint& b) { return {a.x - b.x, a.y - b.y}; }
inline JointPoint operator*(double s, const JointPoint& a) { return {s * a.x, s * a.y}; }
inline double max_abs_diff(const JointPoint& a, const JointPoint& b) {
  return std::max(max_abs_diff(a.x, b.x), max_abs_diff(a.y, b.y));
}

// Gradient-evaluation counters for one solver run.
struct QueryLedger {
  long long f_queries = 0;     // full operator F
  long long h_queries = 0;     // zero-sum part / saddle-subproblem operator
  long long g_queries = 0;     // coupling gradient
  long long cert_queries = 0;  // evaluations spent only on stopping certificates

  long long total() const noexcept { return f_queries + h_queries + g_queries + cert_queries; }
  QueryLedger& operator+=(const QueryLedger& o) noexcept {
    f_queries += o.f_queries;
    h_queries += o.h_queries;
    g_queries += o.g_queries;
    cert_queries += o.cert_queries;
    return *this;
  }
  bool operator==(const QueryLedger&) const = default;
};

// Zero-sum part of the form
//   h(x, y) = (curv_x/2)|x|^2 + <lin_x, x> - (curv_y/2)|y|^2 + <lin_y, y> + <K x, y>
// (up to a constant). Enables the accelerated primal-dual inner solver.
struct BilinearStructure {
  double curv_x = 0.0;
  double curv_y = 0.0;
  DenseVector lin_x;
  DenseVector lin_y;
  SparseMatrix coupling;
  double coupling_norm = 0.0;  // upper estimate of |K|_2
};

// Relative inflation applied to power-iteration norm estimates wherever an
// upper bound is needed (stepsizes, certificates).
inline constexpr double kNormSafety = 1e-6;

inline BilinearStructure make_bilinear_structure(double curv_x, DenseVector lin_x, double curv_y,
                                                 DenseVector lin_y, SparseMatrix K) {
  detail::require_dims(lin_x.size(), K.cols(), "bilinear structure (x)");
  detail::require_dims(lin_y.size(), K.rows(), "bilinear structure (y)");
  if (curv_x < 0.0 || curv_y < 0.0)
    throw PreconditionError("bilinear structure: curvatures must be nonnegative");
  const double kn = K.nnz() == 0 ? 0.0 : spectral_norm(K) * (1.0 + kNormSafety);
  return {curv_x, curv_y, std::move(lin_x), std::move(lin_y), std::move(K), kn};
}

using PartialOracle = std::function<DenseVector(const JointPoint&)>;
using ValueOracle = std::function<double(const JointPoint&)>;

struct GameSpec {
  std::string name;
  PartialOracle grad_u1_x;
  PartialOracle grad_u1_y;
  PartialOracle grad_u2_x;
  PartialOracle grad_u2_y;
  double L = 0.0;      // smoothness of u1, u2
  double mu = 0.0;     // strong convexity of h in x
  double nu = 0.0;     // strong concavity of h in y
  double delta = 0.0;  // smoothness of g
  FeasibleSet X = FeasibleSet::simplex(1);
  FeasibleSet Y = FeasibleSet::simplex(1);
  std::optional<JointPoint> known_ne;
  ValueOracle u1;  // optional
  ValueOracle u2;  // optional

  // Certified strong-monotonicity modulus of F when it differs from min(mu, nu).
  std::optional<double> monotone_modulus;
  std::optional<BilinearStructure> zero_sum_structure;
  // u1 = -(a/2)|x|^2 + (linear in x) for fixed y; same for u2 in y. Lets
  // best responses be computed in closed form.
  std::optional<double> own_curvature_x;
  std::optional<double> own_curvature_y;
  // Verify F == grad g + H on every operator_F call.
  bool cross_check = false;

  bool has_values() const noexcept { return static_cast<bool>(u1) && static_cast<bool>(u2); }
  double modulus() const noexcept { return monotone_modulus.value_or(std::min(mu, nu)); }

  void validate() const {
    if (!grad_u1_x || !grad_u1_y || !grad_u2_x || !grad_u2_y)
      throw PreconditionError("game: all four partial gradient oracles are required");
    if (!(L > 0.0) || !std::isfinite(L)) throw PreconditionError("game: L must be positive");
    if (mu < 0.0 || nu < 0.0 || mu > L * (1.0 + 1e-12) || nu > L * (1.0 + 1e-12))
      throw PreconditionError("game: moduli must lie in [0, L]");
    if (delta < 0.0 || delta > L * (1.0 + 1e-12))
      throw PreconditionError("game: delta must lie in [0, L]");
    if (known_ne) {
      detail::require_dims(known_ne->x.size(), X.dim(), "known_ne.x");
      detail::require_dims(known_ne->y.size(), Y.dim(), "known_ne.y");
      if (!contains(X, known_ne->x) || !contains(Y, known_ne->y))
        throw PreconditionError("game: known_ne is infeasible");
    }
  }
};

inline FeasibleSet joint_set(const GameSpec& game) { return FeasibleSet::product({game.X, game.Y}); }

inline double joint_squared_diameter(const GameSpec& game) {
  return squared_diameter(game.X) + squared_diameter(game.Y);
}

inline JointPoint project(const GameSpec& game, const JointPoint& z) {
  return {project(game.X, z.x), project(game.Y, z.y)};
}

inline bool feasible(const GameSpec& game, const JointPoint& z, double slack = 1e-10) {
  return z.x.size() == game.X.dim() && z.y.size() == game.Y.dim() && contains(game.X, z.x, slack) &&
         contains(game.Y, z.y, slack);
}

inline JointPoint initial_point(const GameSpec& game) {
  return {initial_point(game.X), initial_point(game.Y)};
}

inline JointPoint grad_g(const GameSpec& game, const JointPoint& z, QueryLedger* ledger = nullptr) {
  if (ledger) ++ledger->g_queries;
  DenseVector gx = game.grad_u1_x(z) + game.grad_u2_x(z);
  DenseVector gy = game.grad_u1_y(z) + game.grad_u2_y(z);
  return {-0.5 * gx, -0.5 * gy};
}

inline JointPoint operator_H(const GameSpec& game, const JointPoint& z, QueryLedger* ledger = nullptr) {
  if (ledger) ++ledger->h_queries;
  DenseVector hx = game.grad_u2_x(z) - game.grad_u1_x(z);
  DenseVector hy = game.grad_u1_y(z) - game.grad_u2_y(z);
  return {0.5 * hx, 0.5 * hy};
}

inline JointPoint operator_F(const GameSpec& game, const JointPoint& z, QueryLedger* ledger = nullptr) {
  if (ledger) ++ledger->f_queries;
  JointPoint f{-game.grad_u1_x(z), -game.grad_u2_y(z)};
  if (game.cross_check) {
    const JointPoint split = grad_g(game, z) + operator_H(game, z);
    const double scale = std::max(1.0, std::max(max_abs(f.x), max_abs(f.y)));
    if (max_abs_diff(split, f) > 1e-12 * scale)
      throw std::logic_error("operator_F: decomposition identity violated");
  }
  return f;
}

// Values of the two parts; require value oracles.
inline double value_g(const GameSpec& game, const JointPoint& z) {
  if (!game.has_values()) throw PreconditionError("game: value oracles are required");
  return -0.5 * (game.u1(z) + game.u2(z));
}

inline double value_h(const GameSpec& game, const JointPoint& z) {
  if (!game.has_values()) throw PreconditionError("game: value oracles are required");
  return 0.5 * (game.u2(z) - game.u1(z));
}

struct StructureReport {
  double monotonicity = std::numeric_limits<double>::infinity();    // min secant of F
  double coupling_convexity = std::numeric_limits<double>::infinity();  // min secant of grad g
  double coupling_smoothness = 0.0;  // max |grad g(z') - grad g(z)| / |z' - z|
  int pairs = 0;
};

inline JointPoint sample_point(const GameSpec& game, std::mt19937_64& rng) {
  return {sample_point(game.X, rng), sample_point(game.Y, rng)};
}

inline StructureReport probe_structure(const GameSpec& game, int n_pairs, std::uint64_t seed) {
  if (n_pairs < 1) throw PreconditionError("probe_structure: n_pairs must be >= 1");
  std::mt19937_64 rng(seed);
  StructureReport rep;
  while (rep.pairs < n_pairs) {
    const JointPoint z = sample_point(game, rng);
    const JointPoint w = sample_point(game, rng);
    const JointPoint d = w - z;
    const double d2 = squared_norm(d);
    if (!(d2 > 0.0)) continue;
    const JointPoint dF = operator_F(game, w) - operator_F(game, z);
    const JointPoint dG = grad_g(game, w) - grad_g(game, z);
    rep.monotonicity = std::min(rep.monotonicity, dot(dF, d) / d2);
    rep.coupling_convexity = std::min(rep.coupling_convexity, dot(dG, d) / d2);
    rep.coupling_smoothness = std::max(rep.coupling_smoothness, norm(dG) / std::sqrt(d2));
    ++rep.pairs;
  }
  return rep;
}

}  // namespace nzsg

#endif
