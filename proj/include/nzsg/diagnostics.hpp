#ifndef NZSG_DIAGNOSTICS_HPP
#define NZSG_DIAGNOSTICS_HPP

// Equilibrium diagnostics: the potential gap
//   Delta(z) = max_w  g(z) - g(w) + h(x, w_y) - h(w_x, y)
// the unilateral deviation gain, and the leader-follower best-response
// dynamic on the counterexample game.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "nzsg/game.hpp"
#include "nzsg/instances.hpp"
#include "nzsg/saddle.hpp"

namespace nzsg {

enum class GapMethod { exact_lmo, projected_ascent, grid };

inline const char* to_string(GapMethod m) {
  switch (m) {
    case GapMethod::exact_lmo: return "exact-lmo";
    case GapMethod::projected_ascent: return "projected-ascent";
    case GapMethod::grid: return "grid";
  }
  return "unknown";
}

// Lower estimate and certified upper bound of a concave maximization.
struct MaxBounds {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  JointPoint argmax;
};

struct DeviationReport {
  double gain_x = 0.0;
  double gain_y = 0.0;
  double total = 0.0;
  double upper = 0.0;  // certified upper bound on total
  GapMethod method = GapMethod::exact_lmo;
  JointPoint best_response;
};

struct GapReport {
  double delta_value = 0.0;  // certified lower bound on Delta(z)
  double delta_upper = 0.0;  // certified upper bound on Delta(z)
  double deviation_gain = 0.0;
  GapMethod method = GapMethod::projected_ascent;
};

inline constexpr int kDefaultGapBudget = 500;

namespace detail {

inline void require_values(const GameSpec& game) {
  if (!game.has_values()) throw PreconditionError("diagnostics: value oracles are required");
}

// Accelerated projected gradient ascent of a concave, lip-smooth objective
// over X x Y with function-value restarts. The upper bound is the
// Frank-Wolfe bound at the best iterate.
inline MaxBounds maximize_concave(const std::function<double(const JointPoint&)>& f,
                                  const std::function<JointPoint(const JointPoint&)>& grad, const FeasibleSet& X,
                                  const FeasibleSet& Y, const JointPoint& start, double lip, int budget) {
  const double step = lip > 0.0 ? 1.0 / lip : 1.0;
  MaxBounds r;
  JointPoint z = start, z_prev = start, best = start;
  double f_best = f(start), f_cur = f_best;
  double t = 1.0;
  for (int k = 0; k < budget; ++k) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const JointPoint v = z + ((t - 1.0) / t_next) * (z - z_prev);
    const JointPoint gv = grad(v);
    JointPoint z_new = project(X, Y, v + step * gv);
    const double f_new = f(z_new);
    if (f_new < f_cur) {
      t = 1.0;  // restart momentum
      z_prev = z;
      const JointPoint gz = grad(z);
      z_new = project(X, Y, z + step * gz);
      z = z_new;
      f_cur = f(z);
    } else {
      z_prev = z;
      z = std::move(z_new);
      f_cur = f_new;
      t = t_next;
    }
    if (f_cur > f_best) {
      f_best = f_cur;
      best = z;
    }
  }
  const JointPoint gb = grad(best);
  r.lower = f_best;
  r.upper = f_best + lmo_gap(X, -gb.x, best.x) + lmo_gap(Y, -gb.y, best.y);
  r.argmax = best;
  return r;
}

// max over the set of -(a/2)|w|^2 + <c, w>, with c = grad + a * point so that
// the objective's gradient at point equals grad.
inline double own_best_response(const FeasibleSet& S, double a, const DenseVector& point, const DenseVector& grad,
                                DenseVector& out) {
  const DenseVector c = lincomb(1.0, grad, a, point);
  out = a > 0.0 ? project(S, (1.0 / a) * c) : lmo(S, -c);
  return dot(c, out - point) - 0.5 * a * (squared_norm(out) - squared_norm(point));
}

}  // namespace detail

inline MaxBounds potential_gap_bounds(const GameSpec& game, const JointPoint& z, int budget = kDefaultGapBudget) {
  detail::require_values(game);
  const double g0 = value_g(game, z);
  auto f = [&](const JointPoint& w) {
    return g0 - value_g(game, w) + value_h(game, {z.x, w.y}) - value_h(game, {w.x, z.y});
  };
  auto grad = [&](const JointPoint& w) {
    const JointPoint gg = grad_g(game, w);
    const DenseVector hx = operator_H(game, {w.x, z.y}).x;   // d_x h(w_x, y)
    const DenseVector hy = operator_H(game, {z.x, w.y}).y;   // -d_y h(x, w_y)
    return JointPoint{-gg.x - hx, -gg.y - hy};
  };
  return detail::maximize_concave(f, grad, game.X, game.Y, z, game.L + game.delta, budget);
}

inline double potential_gap(const GameSpec& game, const JointPoint& z, int budget = kDefaultGapBudget) {
  return potential_gap_bounds(game, z, budget).lower;
}

// Sum of both players' best unilateral improvements at z. Closed form when
// the own-strategy curvature is declared, projected ascent otherwise.
inline DeviationReport deviation_report(const GameSpec& game, const JointPoint& z, int budget = kDefaultGapBudget) {
  detail::require_values(game);
  DeviationReport r;
  r.best_response = z;
  if (game.own_curvature_x && game.own_curvature_y) {
    r.method = GapMethod::exact_lmo;
    r.gain_x = detail::own_best_response(game.X, *game.own_curvature_x, z.x, game.grad_u1_x(z), r.best_response.x);
    r.gain_y = detail::own_best_response(game.Y, *game.own_curvature_y, z.y, game.grad_u2_y(z), r.best_response.y);
    r.gain_x = std::max(r.gain_x, 0.0);
    r.gain_y = std::max(r.gain_y, 0.0);
    r.total = r.gain_x + r.gain_y;
    r.upper = r.total;
    return r;
  }
  r.method = GapMethod::projected_ascent;
  // The two deviations are independent; maximize them jointly.
  const double base = game.u1(z) + game.u2(z);
  auto f = [&](const JointPoint& w) { return game.u1({w.x, z.y}) + game.u2({z.x, w.y}) - base; };
  auto grad = [&](const JointPoint& w) {
    return JointPoint{game.grad_u1_x({w.x, z.y}), game.grad_u2_y({z.x, w.y})};
  };
  const MaxBounds m = detail::maximize_concave(f, grad, game.X, game.Y, z, game.L, budget);
  r.best_response = m.argmax;
  r.gain_x = game.u1({m.argmax.x, z.y}) - game.u1(z);
  r.gain_y = game.u2({z.x, m.argmax.y}) - game.u2(z);
  r.total = m.lower;
  r.upper = m.upper;
  return r;
}

inline double deviation_gain(const GameSpec& game, const JointPoint& z, int budget = kDefaultGapBudget) {
  return deviation_report(game, z, budget).total;
}

inline GapReport gap_report(const GameSpec& game, const JointPoint& z, int budget = kDefaultGapBudget) {
  const MaxBounds d = potential_gap_bounds(game, z, budget);
  const DeviationReport dev = deviation_report(game, z, budget);
  GapReport r;
  r.delta_value = d.lower;
  r.delta_upper = d.upper;
  r.deviation_gain = dev.total;
  r.method = dev.method;
  return r;
}

// Best-response dynamic on the leader-follower counterexample: the follower
// plays y(x) = clip(x2/4 - 1, [-1, 0]) and the leader minimizes
// f(x) = -u1(x, y(x)) by projected gradient. Returns (x, y(x)) at the limit.
inline JointPoint stackelberg_demo(double tol = 1e-12) {
  const GameSpec game = stackelberg_example();
  auto follower = [](const DenseVector& x) { return DenseVector{std::clamp(x[1] / 4.0 - 1.0, -1.0, 0.0)}; };
  const double step = 1.0 / (9.0 / 8.0);  // f has Hessian [[1, -1/8], [-1/8, 1]]
  DenseVector x = initial_point(game.X);
  for (int k = 0; k < 100000; ++k) {
    const DenseVector y = follower(x);
    const JointPoint z{x, y};
    DenseVector gf = -game.grad_u1_x(z);
    const double dy = x[1] / 4.0 - 1.0;
    if (dy > -1.0 && dy < 0.0) gf[1] -= 0.25 * game.grad_u1_y(z)[0];  // chain rule through y(x)
    DenseVector x_new = project(game.X, lincomb(1.0, x, -step, gf));
    const double moved = std::sqrt(squared_distance(x_new, x));
    x = std::move(x_new);
    if (moved <= tol) break;
  }
  return {x, follower(x)};
}

}  // namespace nzsg

#endif
