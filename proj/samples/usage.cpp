// Solve a small fee game with ICL and the two baselines, then check the
// deviation gain of the ICL point.

#include <cstdio>

#include "nzsg/nzsg.hpp"

int main() {
  using namespace nzsg;
  const SparseExperiment e = gen_sparse_experiment(200, 200, 2000, 7, 1e-4, 1.0, true);
  const MatrixGame game = e.game(0.0006);

  const ReformulatedGame rf = reformulate_bilinear(game);
  const IclReport icl = solve_icl(rf.spec, 1e-7);
  std::printf("icl   %-9s outer %3lld  h %6lld  g %4lld  cert %5lld  bound %.3g\n", to_string(icl.status),
              icl.iterations, icl.ledger.h_queries, icl.ledger.g_queries, icl.ledger.cert_queries,
              icl.certified_sq_distance.value_or(-1.0));

  const GameSpec spec = to_game_spec(game);
  SolverConfig cfg;
  cfg.epsilon = 1e-7;
  const SolveReport og = solve_ogda(spec, cfg);
  const SolveReport eg = solve_eg(spec, cfg);
  std::printf("ogda  %-9s iters %6lld  F %6lld  cert %5lld\n", to_string(og.status), og.iterations,
              og.ledger.f_queries, og.ledger.cert_queries);
  std::printf("eg    %-9s iters %6lld  F %6lld  cert %5lld\n", to_string(eg.status), eg.iterations,
              eg.ledger.f_queries, eg.ledger.cert_queries);
  std::printf("|icl - ogda| = %.3g\n", distance(icl.point, og.point));
  std::printf("deviation gain at icl point: %.3g\n", deviation_gain(spec, icl.point));
}
