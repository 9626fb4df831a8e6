#ifndef NZSG_ICL_HPP
#define NZSG_ICL_HPP

// Iterative coupling linearization: freeze grad g at the current iterate,
// solve the resulting proximal zero-sum saddle problem inexactly, repeat.
// Also the reduction for games that are monotone but not strongly so.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nzsg/saddle.hpp"

namespace nzsg {

struct IclSchedule {
  double eta = 0.0;
  double theta = 0.0;
  double eps_t = 0.0;         // inexactness budget per outer iteration
  long long T = 1;            // outer iteration cap
  double inner_target = 0.0;  // squared-distance target for the inner solve
  double modulus = 0.0;       // min(mu, nu)
  double sq_diameter = 0.0;   // D_X^2 + D_Y^2
};

inline IclSchedule schedule_params(double mu, double nu, double delta, double L, double eps, double D_X,
                                   double D_Y) {
  const double m = std::min(mu, nu);
  if (!(m > 0.0)) throw PreconditionError("schedule: min(mu, nu) must be positive; use solve_monotone");
  if (!(eps > 0.0)) throw PreconditionError("schedule: eps must be positive");
  if (delta < 0.0 || delta > L * (1.0 + 1e-12)) throw PreconditionError("schedule: delta must lie in [0, L]");
  IclSchedule s;
  s.modulus = m;
  s.eta = delta > 0.0 ? std::min(1.0 / delta, 1.0 / m) : 1.0 / m;
  s.theta = m / (1.0 / s.eta + m);
  s.eps_t = s.theta * eps / (4.0 * s.eta);
  s.sq_diameter = D_X * D_X + D_Y * D_Y;
  const double ratio = 2.0 * s.sq_diameter / eps;
  s.T = ratio > 1.0 ? static_cast<long long>(std::ceil(std::log(ratio) / s.theta)) : 1;
  s.T = std::max<long long>(s.T, 1);
  s.inner_target = s.eps_t * s.eps_t / (8.0 * L * L * s.sq_diameter);
  return s;
}

inline IclSchedule schedule_params(const GameSpec& game, double eps) {
  return schedule_params(game.mu, game.nu, game.delta, game.L, eps, diameter(game.X), diameter(game.Y));
}

inline SaddleSubproblem build_subproblem(const GameSpec& game, const JointPoint& z_t, double eta,
                                         QueryLedger* ledger = nullptr) {
  if (!(eta > 0.0)) throw PreconditionError("build_subproblem: eta must be positive");
  const JointPoint c = grad_g(game, z_t, ledger);
  SaddleSubproblem sub;
  sub.game = &game;
  sub.center = z_t;
  sub.c_x = c.x;
  sub.c_y = c.y;
  sub.eta = eta;
  sub.X = game.X;
  sub.Y = game.Y;
  const double r = 1.0 / eta;
  if (game.zero_sum_structure) {
    const auto& h = *game.zero_sum_structure;
    BilinearStructure s;
    s.curv_x = h.curv_x + r;
    s.curv_y = h.curv_y + r;
    s.lin_x = h.lin_x + c.x - r * z_t.x;
    s.lin_y = h.lin_y - c.y + r * z_t.y;
    s.coupling = h.coupling;
    s.coupling_norm = h.coupling_norm;
    sub.lipschitz = s.coupling_norm + std::max(s.curv_x, s.curv_y);
    sub.modulus = std::min(s.curv_x, s.curv_y);
    sub.structure = std::move(s);
  } else {
    sub.lipschitz = game.L + r;
    sub.modulus = std::min(game.mu, game.nu) + r;
  }
  return sub;
}

inline double check_inexactness(const SaddleSubproblem& sub, const JointPoint& candidate,
                                QueryLedger* ledger = nullptr) {
  return subproblem_gap(sub, candidate, subproblem_operator(sub, candidate, ledger));
}

enum class InnerSolver { automatic, apd, extragradient };

struct IclOptions {
  InnerSolver inner = InnerSolver::automatic;
  int check_period = 8;
  PrimalDualOptions primal_dual;
  // Start each inner solve from the primal weight the previous one ended with.
  bool carry_weight = false;
  long long max_inner = 2'000'000;
  bool stop_on_certificate = true;  // stop once the running bound is <= eps
  // Also stop once the extragradient distance certificate on the whole game
  // (the baselines' stopping rule) certifies eps at an outer iterate.
  bool certify_outer = true;
  // With certify_outer, also certify the running primal-dual iterate every
  // this many inner steps (0: never) and stop as soon as it certifies eps.
  int certify_inner_period = 64;
  bool record_trace = false;
  std::optional<JointPoint> start;
  std::optional<long long> max_outer;  // further cap below the schedule's T
};

struct IclTraceEntry {
  JointPoint iterate;  // z_{t+1}
  double gap = 0.0;
  long long inner_iterations = 0;
  double bound = 0.0;  // running bound on |z_{t+1} - z*|^2
};

struct IclReport : SolveReport {
  IclSchedule schedule;
  std::vector<IclTraceEntry> trace;
};

struct InnerResult {
  JointPoint candidate;
  double gap = std::numeric_limits<double>::infinity();
  long long iterations = 0;
  double weight = 0.0;  // primal weight at exit (primal-dual inner solver)
  std::optional<double> whole_game_bound;  // set when the candidate certified eps on the whole game
};

// Whole-game squared-distance certificate at a point.
using GameCertifier = std::function<double(const JointPoint&)>;

namespace detail {

// Squared extragradient step below which a subproblem point is a fixed
// point to double precision; its gap cannot be driven lower.
inline double resolution_floor(const JointPoint& z) {
  const double r = 16.0 * std::numeric_limits<double>::epsilon() * norm(z);
  return r * r;
}

// Bound on the inexactness gap at z_hat implied by |z_bar - z*| <= dist for one
// projected step of length gamma on an L-Lipschitz operator.
inline double gap_from_distance(double gamma, double L, double D, double dist) {
  return (1.0 / gamma + L) * (2.0 + gamma * L) * D * dist;
}

inline InnerResult inner_apd(const SaddleSubproblem& sub, const IclSchedule& sch, const IclOptions& opt,
                             QueryLedger& ledger, std::optional<double> weight, const GameCertifier* certify,
                             double eps) {
  PrimalDualOptions po = opt.primal_dual;
  if (weight) po.initial_weight = weight;
  ApdIterator it(sub, sub.center, po);
  auto done = [&it](InnerResult r) {
    r.weight = it.weight();
    return r;
  };
  const double gamma = 1.0 / (2.0 * sub.lipschitz);
  const double D = std::sqrt(sch.sq_diameter);
  const int period = std::max(1, opt.check_period);
  JointOperator G = [&sub](const JointPoint& z) { return subproblem_operator(sub, z); };
  InnerResult best;
  for (long long k = 1; k <= opt.max_inner; ++k) {
    it.step();
    ++ledger.h_queries;
    if (certify && opt.certify_inner_period > 0 && k % opt.certify_inner_period == 0) {
      const double b = (*certify)(it.point());
      if (b <= eps) {
        InnerResult r{it.point(), best.gap, k};
        r.whole_game_bound = b;
        return done(r);
      }
    }
    if (k % period != 0) continue;
    const auto c = certify_distance_step(G, it.point(), gamma, sub.modulus, sub.lipschitz, sub.X, sub.Y,
                                         &ledger.cert_queries);
    const double gap = subproblem_gap(sub, c.step.z_hat, c.step.F_hat);
    if (gap < best.gap) best = {c.step.z_hat, gap, k};
    if (gap <= sch.eps_t) return done({c.step.z_hat, gap, k});
    if (c.bound <= sch.inner_target)
      throw std::logic_error("icl: inexactness check failed at a certified inner solution");
    if (squared_distance(c.step.z_plus, it.point()) <= resolution_floor(c.step.z_hat)) return done(best);
    it.observe(gap);
    const double implied = gap_from_distance(gamma, sub.lipschitz, D, std::sqrt(c.bound));
    if (gap > implied * (1.0 + 1e-9) + 1e-300)
      throw std::logic_error("icl: inexactness gap exceeds the certified-distance bound");
  }
  throw ConvergenceError("icl: inner solver did not reach the inexactness target", best.gap);
}

inline InnerResult inner_extragradient(const SaddleSubproblem& sub, const IclSchedule& sch,
                                       const IclOptions& opt, QueryLedger& ledger) {
  const double gamma = 1.0 / (2.0 * sub.lipschitz);
  JointOperator G = [&sub](const JointPoint& z) { return subproblem_operator(sub, z); };
  JointPoint z = sub.center;
  InnerResult best;
  for (long long k = 1; k <= opt.max_inner; ++k) {
    const auto s = extragradient_step(G, z, gamma, sub.X, sub.Y, &ledger.h_queries);
    const double gap = subproblem_gap(sub, s.z_hat, s.F_hat);
    if (gap < best.gap) best = {s.z_hat, gap, k};
    if (gap <= sch.eps_t) return best;
    if (squared_distance(s.z_plus, z) <= resolution_floor(s.z_hat)) return best;
    z = s.z_plus;
  }
  throw ConvergenceError("icl: extragradient inner solver did not reach the inexactness target", best.gap);
}

}  // namespace detail

inline IclReport solve_icl(const GameSpec& game, double eps, const IclOptions& opt = {}) {
  game.validate();
  IclReport rep;
  rep.schedule = schedule_params(game, eps);
  const IclSchedule& sch = rep.schedule;

  InnerSolver inner = opt.inner;
  if (inner == InnerSolver::automatic) {
    const bool ok = game.zero_sum_structure && game.zero_sum_structure->curv_x + 1.0 / sch.eta > 0.0 &&
                    game.zero_sum_structure->curv_y + 1.0 / sch.eta > 0.0;
    inner = ok ? InnerSolver::apd : InnerSolver::extragradient;
  }
  if (inner == InnerSolver::apd && !game.zero_sum_structure)
    throw PreconditionError("icl: game has no bilinear zero-sum structure; use the extragradient inner solver");

  JointPoint z = opt.start.value_or(initial_point(game));
  if (!feasible(game, z)) throw PreconditionError("icl: start point is infeasible");
  double bound = sch.sq_diameter;
  std::optional<double> weight;
  const bool certify_game = opt.certify_outer && game.modulus() > 0.0;
  const GameCertifier certify = [&](const JointPoint& p) {
    return certify_distance_step(game_operator(game), p, 1.0 / (2.0 * game.L), game.modulus(), game.L, game.X,
                                 game.Y, &rep.ledger.cert_queries)
        .bound;
  };
  const long long T = opt.max_outer ? std::min(*opt.max_outer, sch.T) : sch.T;
  long long t = 0;
  while (t < T) {
    const SaddleSubproblem sub = build_subproblem(game, z, sch.eta, &rep.ledger);
    InnerResult r;
    try {
      r = inner == InnerSolver::apd ? detail::inner_apd(sub, sch, opt, rep.ledger, weight, certify_game ? &certify : nullptr, eps)
                                    : detail::inner_extragradient(sub, sch, opt, rep.ledger);
    } catch (const ConvergenceError& e) {
      rep.point = z;
      rep.iterations = t;
      rep.certified_sq_distance = bound;
      rep.status = SolveStatus::error;
      rep.message = e.what();
      return rep;
    }
    if (opt.carry_weight && r.weight > 0.0) weight = r.weight;
    if (r.whole_game_bound) {
      z = std::move(r.candidate);
      bound = *r.whole_game_bound;
      ++t;
      rep.residual_history.push_back(bound);
      if (opt.record_trace) rep.trace.push_back({z, r.gap, r.iterations, bound});
      break;
    }
    bound = (1.0 - sch.theta) * (bound + 2.0 * sch.eta * std::max(r.gap, 0.0));
    z = std::move(r.candidate);
    ++t;
    rep.residual_history.push_back(bound);
    if (opt.record_trace) rep.trace.push_back({z, r.gap, r.iterations, bound});
    if (opt.stop_on_certificate && bound <= eps) break;
    if (certify_game) {
      const double c = certify(z);
      if (c < bound) {
        bound = c;
        rep.residual_history.back() = bound;
        if (opt.record_trace) rep.trace.back().bound = bound;
      }
      if (bound <= eps) break;
    }
  }
  rep.point = z;
  rep.iterations = t;
  rep.certified_sq_distance = bound;
  rep.status = bound <= eps ? SolveStatus::converged : SolveStatus::max_iter;
  if (rep.status != SolveStatus::converged) rep.message = "outer iteration cap reached before the bound";
  return rep;
}

struct MonotoneResult {
  JointPoint point;
  double gap_bound = 0.0;
  double mu_bar = 0.0;
  double nu_bar = 0.0;
  double reduced_eps = 0.0;
  GameSpec reduced;
  IclReport inner;
};

// Adds a_x|x|^2 to u2 and a_y|y|^2 to u1 (with the opposite sign on the
// other player) so the zero-sum part gains curvature while g is unchanged.
inline GameSpec reduce_to_strongly_monotone(const GameSpec& game, double eps, double* a_x_out = nullptr,
                                            double* a_y_out = nullptr) {
  const double dx2 = squared_diameter(game.X);
  const double dy2 = squared_diameter(game.Y);
  const double a_x = dx2 > 0.0 ? std::min(eps / (4.0 * dx2), game.L / 2.0) : game.L / 2.0;
  const double a_y = dy2 > 0.0 ? std::min(eps / (4.0 * dy2), game.L / 2.0) : game.L / 2.0;
  if (a_x_out) *a_x_out = a_x;
  if (a_y_out) *a_y_out = a_y;
  GameSpec s = game;
  s.name = game.name + "-reduced";
  s.grad_u1_x = [f = game.grad_u1_x, a_x](const JointPoint& z) {
    DenseVector r = f(z);
    axpy(-2.0 * a_x, z.x, r);
    return r;
  };
  s.grad_u1_y = [f = game.grad_u1_y, a_y](const JointPoint& z) {
    DenseVector r = f(z);
    axpy(2.0 * a_y, z.y, r);
    return r;
  };
  s.grad_u2_x = [f = game.grad_u2_x, a_x](const JointPoint& z) {
    DenseVector r = f(z);
    axpy(2.0 * a_x, z.x, r);
    return r;
  };
  s.grad_u2_y = [f = game.grad_u2_y, a_y](const JointPoint& z) {
    DenseVector r = f(z);
    axpy(-2.0 * a_y, z.y, r);
    return r;
  };
  if (game.u1)
    s.u1 = [f = game.u1, a_x, a_y](const JointPoint& z) {
      return f(z) - a_x * squared_norm(z.x) + a_y * squared_norm(z.y);
    };
  if (game.u2)
    s.u2 = [f = game.u2, a_x, a_y](const JointPoint& z) {
      return f(z) + a_x * squared_norm(z.x) - a_y * squared_norm(z.y);
    };
  s.mu = game.mu + 2.0 * a_x;
  s.nu = game.nu + 2.0 * a_y;
  s.L = game.L + 2.0 * std::max(a_x, a_y);
  s.monotone_modulus = game.modulus() + 2.0 * std::min(a_x, a_y);
  if (game.own_curvature_x) s.own_curvature_x = *game.own_curvature_x + 2.0 * a_x;
  if (game.own_curvature_y) s.own_curvature_y = *game.own_curvature_y + 2.0 * a_y;
  if (game.zero_sum_structure) {
    auto st = *game.zero_sum_structure;
    st.curv_x += 2.0 * a_x;
    st.curv_y += 2.0 * a_y;
    s.zero_sum_structure = std::move(st);
  }
  s.known_ne.reset();
  return s;
}

inline MonotoneResult solve_monotone(const GameSpec& game, double eps, const IclOptions& opt = {}) {
  if (!(eps > 0.0)) throw PreconditionError("solve_monotone: eps must be positive");
  game.validate();
  MonotoneResult res;
  res.reduced = reduce_to_strongly_monotone(game, eps);
  res.mu_bar = res.reduced.mu;
  res.nu_bar = res.reduced.nu;
  const double L = res.reduced.L;
  const double D2 = joint_squared_diameter(game);
  res.reduced_eps = eps * eps / (32.0 * L * L * D2);
  res.inner = solve_icl(res.reduced, res.reduced_eps, opt);
  if (res.inner.status == SolveStatus::error)
    throw ConvergenceError("solve_monotone: " + res.inner.message, res.inner.certified_sq_distance.value_or(0.0));
  const double dist = std::sqrt(res.inner.certified_sq_distance.value_or(res.reduced_eps));
  const auto ne = extract_approx_ne(res.reduced, res.inner.point, 1.0 / (std::sqrt(2.0) * L), dist,
                                    &res.inner.ledger);
  res.point = ne.point;
  res.gap_bound = ne.gap_bound;
  return res;
}

}  // namespace nzsg

#endif
