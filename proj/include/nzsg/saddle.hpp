#ifndef NZSG_SADDLE_HPP
#define NZSG_SADDLE_HPP

// Whole-game variational-inequality baselines (extragradient, optimistic
// gradient), a primal-dual solver for strongly-convex-strongly-concave
// bilinear saddle problems, and the distance / approximate-equilibrium
// certificates built from a single extragradient step.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nzsg/game.hpp"

namespace nzsg {

using JointOperator = std::function<JointPoint(const JointPoint&)>;

enum class SolveStatus { converged, max_iter, error };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::error: return "error";
  }
  return "unknown";
}

struct SolverConfig {
  double gamma = 0.0;  // 0 selects the method default
  double epsilon = 1e-7;
  long long max_iter = 10'000'000;
  int certificate_period = 8;
  std::optional<JointPoint> start;
};

struct SolveReport {
  JointPoint point;
  QueryLedger ledger;
  long long iterations = 0;
  std::optional<double> certified_sq_distance;
  std::vector<double> residual_history;
  SolveStatus status = SolveStatus::error;
  std::string message;
};

inline JointPoint project(const FeasibleSet& X, const FeasibleSet& Y, const JointPoint& z) {
  return {project(X, z.x), project(Y, z.y)};
}

// Pi(z - s * d)
inline JointPoint projected_step(const FeasibleSet& X, const FeasibleSet& Y, const JointPoint& z, double s,
                                 const JointPoint& d) {
  return {project(X, lincomb(1.0, z.x, -s, d.x)), project(Y, lincomb(1.0, z.y, -s, d.y))};
}

struct ExtragradientStep {
  JointPoint z_hat;
  JointPoint z_plus;
  JointPoint F_hat;  // operator value at z_hat
};

inline ExtragradientStep extragradient_step(const JointOperator& F, const JointPoint& z, double gamma,
                                            const FeasibleSet& X, const FeasibleSet& Y,
                                            long long* queries = nullptr,
                                            const JointPoint* F_at_z = nullptr) {
  if (!(gamma > 0.0)) throw PreconditionError("extragradient_step: gamma must be positive");
  JointPoint Fz;
  if (!F_at_z) {
    Fz = F(z);
    if (queries) ++*queries;
  }
  const JointPoint& fz = F_at_z ? *F_at_z : Fz;
  ExtragradientStep s;
  s.z_hat = projected_step(X, Y, z, gamma, fz);
  s.F_hat = F(s.z_hat);
  if (queries) ++*queries;
  s.z_plus = projected_step(X, Y, z, gamma, s.F_hat);
  return s;
}

// 4/(mu gamma)^2 - 2/(mu gamma) + 16
inline double certificate_coefficient(double mu_min, double gamma) {
  const double r = 1.0 / (mu_min * gamma);
  return 4.0 * r * r - 2.0 * r + 16.0;
}

struct DistanceCertificate {
  double bound = std::numeric_limits<double>::infinity();
  ExtragradientStep step;
};

// Upper bound on |z_bar - z*|^2 for a mu_min-strongly monotone, L-Lipschitz
// operator, from one extragradient step with gamma <= 1/(2L).
inline DistanceCertificate certify_distance_step(const JointOperator& F, const JointPoint& z_bar, double gamma,
                                                 double mu_min, double L, const FeasibleSet& X,
                                                 const FeasibleSet& Y, long long* queries = nullptr,
                                                 const JointPoint* F_at_z = nullptr) {
  if (!(mu_min > 0.0)) throw PreconditionError("certify_distance: modulus must be positive");
  if (!(gamma > 0.0) || gamma > (1.0 + 1e-12) / (2.0 * L))
    throw PreconditionError("certify_distance: gamma must lie in (0, 1/(2L)]");
  DistanceCertificate c;
  c.step = extragradient_step(F, z_bar, gamma, X, Y, queries, F_at_z);
  c.bound = certificate_coefficient(mu_min, gamma) * squared_distance(c.step.z_plus, z_bar);
  return c;
}

inline double certify_distance(const JointOperator& F, const JointPoint& z_bar, double gamma, double mu_min,
                               double L, const FeasibleSet& X, const FeasibleSet& Y,
                               long long* queries = nullptr) {
  return certify_distance_step(F, z_bar, gamma, mu_min, L, X, Y, queries).bound;
}

inline JointOperator game_operator(const GameSpec& game) {
  return [&game](const JointPoint& z) { return operator_F(game, z); };
}

struct ApproxEquilibrium {
  JointPoint point;
  double gap_bound = 0.0;
};

// One projected-ascent step per player from z_bar. dist bounds |z_bar - z*|.
inline ApproxEquilibrium extract_approx_ne(const GameSpec& game, const JointPoint& z_bar, double gamma,
                                           double dist, QueryLedger* ledger = nullptr) {
  if (!(gamma > 0.0) || gamma > (1.0 + 1e-12) / (std::sqrt(2.0) * game.L))
    throw PreconditionError("extract_approx_ne: gamma must lie in (0, 1/(sqrt(2) L)]");
  if (ledger) ++ledger->f_queries;
  DenseVector gx = game.grad_u1_x(z_bar);
  DenseVector gy = game.grad_u2_y(z_bar);
  ApproxEquilibrium r;
  r.point = {project(game.X, lincomb(1.0, z_bar.x, gamma, gx)), project(game.Y, lincomb(1.0, z_bar.y, gamma, gy))};
  r.gap_bound = (2.0 / gamma) * std::sqrt(joint_squared_diameter(game)) * dist;
  return r;
}

namespace detail {

struct CertTracker {
  double best = std::numeric_limits<double>::infinity();
  JointPoint best_point;
  void record(double bound, const JointPoint& z, SolveReport& rep) {
    rep.residual_history.push_back(bound);
    if (bound < best) {
      best = bound;
      best_point = z;
    }
  }
};

inline void finish_max_iter(SolveReport& rep, const CertTracker& t, const JointPoint& last) {
  rep.status = SolveStatus::max_iter;
  if (std::isfinite(t.best)) {
    rep.point = t.best_point;
    rep.certified_sq_distance = t.best;
  } else {
    rep.point = last;
  }
  rep.message = "iteration budget exhausted";
}

inline void check_start(const GameSpec& game, const JointPoint& z) {
  if (!feasible(game, z)) throw PreconditionError("solver: start point is infeasible");
}

}  // namespace detail

// Extragradient with the distance certificate checked every
// certificate_period iterations. Without strong monotonicity the run uses
// the full budget.
inline SolveReport solve_eg(const GameSpec& game, const SolverConfig& cfg = {}) {
  const double gamma = cfg.gamma > 0.0 ? cfg.gamma : 1.0 / (std::sqrt(2.0) * game.L);
  const double gamma_c = std::min(gamma, 1.0 / (2.0 * game.L));
  const double mod = game.modulus();
  const int period = std::max(1, cfg.certificate_period);
  JointPoint z = cfg.start.value_or(initial_point(game));
  detail::check_start(game, z);

  SolveReport rep;
  detail::CertTracker tracker;
  for (long long k = 0;; ++k) {
    const JointPoint Fz = operator_F(game, z);
    if (mod > 0.0 && k % period == 0) {
      const auto c = certify_distance_step(game_operator(game), z, gamma_c, mod, game.L, game.X, game.Y,
                                           &rep.ledger.cert_queries, &Fz);
      tracker.record(c.bound, z, rep);
      if (c.bound <= cfg.epsilon) {
        ++rep.ledger.cert_queries;  // F(z) served only the certificate
        rep.point = z;
        rep.iterations = k;
        rep.certified_sq_distance = c.bound;
        rep.status = SolveStatus::converged;
        return rep;
      }
    }
    if (k == cfg.max_iter) {
      ++rep.ledger.cert_queries;
      rep.iterations = k;
      detail::finish_max_iter(rep, tracker, z);
      return rep;
    }
    ++rep.ledger.f_queries;
    const auto s = extragradient_step(game_operator(game), z, gamma, game.X, game.Y, &rep.ledger.f_queries, &Fz);
    z = s.z_plus;
  }
}

// Optimistic gradient (past-extragradient form) with stored operator values.
inline SolveReport solve_ogda(const GameSpec& game, const SolverConfig& cfg = {}) {
  const double gamma = cfg.gamma > 0.0 ? cfg.gamma : 1.0 / (2.0 * game.L);
  const double gamma_c = std::min(gamma, 1.0 / (2.0 * game.L));
  const double mod = game.modulus();
  const int period = std::max(1, cfg.certificate_period);
  JointPoint z = cfg.start.value_or(initial_point(game));
  detail::check_start(game, z);

  SolveReport rep;
  detail::CertTracker tracker;
  std::optional<JointPoint> F_prev;
  for (long long k = 0;; ++k) {
    const JointPoint Fz = operator_F(game, z);
    if (mod > 0.0 && k % period == 0) {
      const auto c = certify_distance_step(game_operator(game), z, gamma_c, mod, game.L, game.X, game.Y,
                                           &rep.ledger.cert_queries, &Fz);
      tracker.record(c.bound, z, rep);
      if (c.bound <= cfg.epsilon) {
        ++rep.ledger.cert_queries;
        rep.point = z;
        rep.iterations = k;
        rep.certified_sq_distance = c.bound;
        rep.status = SolveStatus::converged;
        return rep;
      }
    }
    if (k == cfg.max_iter) {
      ++rep.ledger.cert_queries;
      rep.iterations = k;
      detail::finish_max_iter(rep, tracker, z);
      return rep;
    }
    ++rep.ledger.f_queries;
    const JointPoint& Fp = F_prev ? *F_prev : Fz;
    const JointPoint dir = 2.0 * Fz - Fp;
    z = projected_step(game.X, game.Y, z, gamma, dir);
    F_prev = Fz;
  }
}

// Proximal saddle problem of one outer iteration:
//   phi(x, y) = <c_x, x> + |x - x_t|^2/(2 eta) + h(x, y) - <c_y, y> - |y - y_t|^2/(2 eta)
// Its operator is (d_x phi, -d_y phi).
struct SaddleSubproblem {
  const GameSpec* game = nullptr;  // non-owning; supplies H when no structure is attached
  JointPoint center;
  DenseVector c_x;
  DenseVector c_y;
  double eta = 1.0;
  FeasibleSet X = FeasibleSet::simplex(1);
  FeasibleSet Y = FeasibleSet::simplex(1);
  // phi = (a/2)|x|^2 + <p, x> - (b/2)|y|^2 + <q, y> + <K x, y> when present.
  std::optional<BilinearStructure> structure;
  double lipschitz = 0.0;
  double modulus = 0.0;
};

inline JointPoint subproblem_operator(const SaddleSubproblem& sub, const JointPoint& z,
                                      QueryLedger* ledger = nullptr) {
  if (ledger) ++ledger->h_queries;
  if (sub.structure) {
    const auto& s = *sub.structure;
    DenseVector gx = spmv_transpose(s.coupling, z.y);
    DenseVector gy = spmv(s.coupling, z.x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += s.curv_x * z.x[i] + s.lin_x[i];
    for (std::size_t j = 0; j < gy.size(); ++j) gy[j] = s.curv_y * z.y[j] - s.lin_y[j] - gy[j];
    return {std::move(gx), std::move(gy)};
  }
  JointPoint H = operator_H(*sub.game, z);
  const double r = 1.0 / sub.eta;
  for (std::size_t i = 0; i < H.x.size(); ++i) H.x[i] += sub.c_x[i] + r * (z.x[i] - sub.center.x[i]);
  for (std::size_t j = 0; j < H.y.size(); ++j) H.y[j] += sub.c_y[j] + r * (z.y[j] - sub.center.y[j]);
  return H;
}

// max over X x Y of <G(z), z - w> given G(z).
inline double subproblem_gap(const SaddleSubproblem& sub, const JointPoint& z, const JointPoint& Gz) {
  return lmo_gap(sub.X, Gz.x, z.x) + lmo_gap(sub.Y, Gz.y, z.y);
}

struct PrimalDualOptions {
  // true: plain primal-dual steps tau = w/|K|, sigma = 1/(w|K|) with the
  // primal weight w re-estimated from iterate movement at restarts.
  // false: accelerated steps fixed by the strong-convexity moduli.
  bool adaptive_weight = true;
  double restart_decay = 0.5;  // restart once the observed gap falls by this factor
  // Starting primal weight; sqrt(b/a) when unset. Lets a sequence of
  // related subproblems reuse the weight learned on the previous one.
  std::optional<double> initial_weight;
};

// Primal-dual (Chambolle-Pock) iteration for
//   min_x max_y (a/2)|x|^2 + <p,x> + <Kx,y> - (b/2)|y|^2 + <q,y>
// over X x Y, with proximal maps realized as shifted projections.
// One operator evaluation per step.
class ApdIterator {
 public:
  ApdIterator(const SaddleSubproblem& sub, const JointPoint& start, PrimalDualOptions opt = {})
      : sub_(sub), opt_(opt), x_(start.x), y_(start.y) {
    if (!sub.structure)
      throw PreconditionError(
          "accelerated primal-dual solver needs bilinear structure; use the extragradient fallback");
    const auto& s = *sub.structure;
    if (!(s.curv_x > 0.0) || !(s.curv_y > 0.0))
      throw PreconditionError("accelerated primal-dual solver needs positive curvature on both sides");
    const double a = s.curv_x, b = s.curv_y;
    if (!(s.coupling_norm > 0.0)) {
      // Decoupled: one step with very long steps lands on the solution.
      tau_ = 1e12 / a;
      sigma_ = 1e12 / b;
      theta_ = 0.0;
    } else if (opt_.adaptive_weight) {
      weight0_ = std::sqrt(b / a);
      set_weight(std::clamp(opt_.initial_weight.value_or(weight0_), weight0_ * 1e-3, weight0_ * 1e3));
    } else {
      const double rate = 2.0 * std::sqrt(a * b) / s.coupling_norm;
      tau_ = rate / (2.0 * a);
      sigma_ = rate / (2.0 * b);
      theta_ = 1.0 / (1.0 + rate);
    }
    x_bar_ = x_;
    x_ref_ = x_;
    y_ref_ = y_;
  }

  void step() {
    const auto& s = *sub_.structure;
    DenseVector v = spmv(s.coupling, x_bar_);
    for (std::size_t j = 0; j < v.size(); ++j)
      v[j] = (y_[j] / sigma_ + v[j] + s.lin_y[j]) / (s.curv_y + 1.0 / sigma_);
    y_ = project(sub_.Y, v);
    DenseVector u = spmv_transpose(s.coupling, y_);
    for (std::size_t i = 0; i < u.size(); ++i)
      u[i] = (x_[i] / tau_ - u[i] - s.lin_x[i]) / (s.curv_x + 1.0 / tau_);
    DenseVector x_new = project(sub_.X, u);
    for (std::size_t i = 0; i < x_new.size(); ++i) x_bar_[i] = x_new[i] + theta_ * (x_new[i] - x_[i]);
    x_ = std::move(x_new);
  }

  // Feed the optimality gap measured at the current iterate. In adaptive
  // mode a sufficient decrease triggers a restart with a new primal weight.
  void observe(double gap) {
    if (!opt_.adaptive_weight || !(sub_.structure->coupling_norm > 0.0)) return;
    if (!std::isfinite(gap_ref_)) {
      gap_ref_ = gap;
      return;
    }
    if (gap > opt_.restart_decay * gap_ref_) return;
    const double dx = std::sqrt(squared_distance(x_, x_ref_));
    const double dy = std::sqrt(squared_distance(y_, y_ref_));
    if (dx > 0.0 && dy > 0.0) {
      const double w = std::sqrt(weight_ * (dx / dy));
      set_weight(std::clamp(w, weight0_ * 1e-3, weight0_ * 1e3));
    }
    x_ref_ = x_;
    y_ref_ = y_;
    x_bar_ = x_;
    gap_ref_ = gap;
  }

  JointPoint point() const { return {x_, y_}; }
  double weight() const noexcept { return weight_; }

 private:
  void set_weight(double w) {
    const double kn = sub_.structure->coupling_norm;
    weight_ = w;
    tau_ = w / kn;
    sigma_ = 1.0 / (w * kn);
    theta_ = 1.0;
  }

  const SaddleSubproblem& sub_;
  PrimalDualOptions opt_;
  DenseVector x_, y_, x_bar_;
  DenseVector x_ref_, y_ref_;
  double tau_ = 0.0, sigma_ = 0.0, theta_ = 0.0;
  double weight0_ = 1.0, weight_ = 1.0;
  double gap_ref_ = std::numeric_limits<double>::infinity();
};

struct ApdOptions {
  long long max_iter = 10'000'000;
  int certificate_period = 8;
  std::optional<JointPoint> start;
  PrimalDualOptions method;
};

// Certified solve of a bilinear strongly-convex-strongly-concave saddle
// subproblem: stops once the extragradient distance certificate on the
// subproblem operator drops below target_sq_dist.
inline SolveReport solve_apd_bilinear(const SaddleSubproblem& sub, double target_sq_dist,
                                      const ApdOptions& opt = {}) {
  if (!(target_sq_dist > 0.0)) throw PreconditionError("solve_apd_bilinear: target must be positive");
  ApdIterator it(sub, opt.start.value_or(sub.center), opt.method);
  const double gamma = 1.0 / (2.0 * sub.lipschitz);
  const int period = std::max(1, opt.certificate_period);
  SolveReport rep;
  detail::CertTracker tracker;
  JointOperator G = [&sub](const JointPoint& z) { return subproblem_operator(sub, z); };
  for (long long k = 1; k <= opt.max_iter; ++k) {
    it.step();
    ++rep.ledger.h_queries;
    if (k % period != 0 && k != opt.max_iter) continue;
    const JointPoint z = it.point();
    const auto c = certify_distance_step(G, z, gamma, sub.modulus, sub.lipschitz, sub.X, sub.Y,
                                         &rep.ledger.cert_queries);
    tracker.record(c.bound, z, rep);
    it.observe(subproblem_gap(sub, c.step.z_hat, c.step.F_hat));
    if (c.bound <= target_sq_dist) {
      rep.point = z;
      rep.iterations = k;
      rep.certified_sq_distance = c.bound;
      rep.status = SolveStatus::converged;
      return rep;
    }
  }
  rep.iterations = opt.max_iter;
  detail::finish_max_iter(rep, tracker, it.point());
  return rep;
}

// Generic fallback: the subproblem as a zero-sum game (u1 = -phi, u2 = phi)
// for solve_eg / solve_ogda when no bilinear structure is available.
inline GameSpec subproblem_game(const SaddleSubproblem& sub) {
  auto s = std::make_shared<const SaddleSubproblem>(sub);
  GameSpec g;
  g.name = "saddle-subproblem";
  g.grad_u1_x = [s](const JointPoint& z) { return -subproblem_operator(*s, z).x; };
  g.grad_u1_y = [s](const JointPoint& z) { return subproblem_operator(*s, z).y; };
  g.grad_u2_x = [s](const JointPoint& z) { return subproblem_operator(*s, z).x; };
  g.grad_u2_y = [s](const JointPoint& z) { return -subproblem_operator(*s, z).y; };
  g.L = sub.lipschitz;
  g.mu = g.nu = sub.modulus;
  g.X = sub.X;
  g.Y = sub.Y;
  g.validate();
  return g;
}

}  // namespace nzsg

#endif
