// nzsg: generate | solve | bench | gap
//
// Exit codes: 0 success, 1 solver non-convergence, 2 usage or validation.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nzsg/nzsg.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kNoConvergence = 1;
constexpr int kUsage = 2;

template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::istringstream is(tok);
    T v{};
    if (!(is >> v) || !is.eof()) throw nzsg::PreconditionError("bad list element: " + tok);
    out.push_back(v);
  }
  return out;
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

struct GenerateArgs {
  std::size_t n = 1000, m = 1000, nnz = 10000;
  std::uint64_t seed = 0;
  double mu = 1e-4, nu = 1.0;
  bool normalize = true;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  if (a.n == 0 || a.m == 0) throw nzsg::PreconditionError("--n and --m must be positive");
  if (static_cast<double>(a.nnz) > static_cast<double>(a.n) * static_cast<double>(a.m))
    throw nzsg::PreconditionError("--nnz exceeds n*m");
  const auto e = nzsg::gen_sparse_experiment(a.n, a.m, a.nnz, a.seed, a.mu, a.nu, a.normalize);
  nzsg::save_instance(a.out, e);
  std::printf("wrote %s: %zu x %zu, nnz %zu, seed %llu\n", a.out.c_str(), e.m, e.n, e.M.nnz(),
              static_cast<unsigned long long>(e.seed));
  return kOk;
}

struct SolveArgs {
  std::string method = "icl";
  std::string instance;
  double rho = 0.0;
  double eps = 1e-7;
  long long max_iter = 20'000'000;
  std::string out;
};

int cmd_solve(const SolveArgs& a) {
  const nzsg::Method method = nzsg::parse_method(a.method);
  if (!(a.eps > 0.0)) throw nzsg::PreconditionError("--eps must be positive");
  if (!(a.rho >= 0.0 && a.rho <= 1.0)) throw nzsg::PreconditionError("--rho must lie in [0, 1]");
  const auto file = nzsg::load_instance(a.instance);
  if (method == nzsg::Method::icl) (void)nzsg::reformulate_bilinear(file.experiment.game(a.rho));
  nzsg::RunOptions opt;
  opt.eps = a.eps;
  opt.max_iter = a.max_iter;
  nzsg::RunRecord r = nzsg::run_method(method, file.experiment, a.rho, opt);
  r.instance_hash = file.payload_hash;
  const auto j = nzsg::report_json(r);
  if (!a.out.empty()) nzsg::write_file(a.out, j.dump(2) + "\n");
  std::printf("%s rho=%g status=%s iterations=%lld queries_h=%lld queries_g=%lld queries_cert=%lld "
              "certified_sq_distance=%.6g wall_ms=%.1f\n",
              nzsg::to_string(r.method), r.rho, nzsg::to_string(r.status), r.iterations, r.queries_h(),
              r.ledger.g_queries, r.ledger.cert_queries, r.certified_sq_distance.value_or(std::nan("")),
              r.wall_ms);
  if (!r.ok()) {
    std::fprintf(stderr, "not converged: %s\n", r.message.c_str());
    return kNoConvergence;
  }
  return kOk;
}

struct BenchArgs {
  std::string table = "t1";
  std::string scale = "desk";
  std::string seeds = "0,111,222,333,444,555,666,777,888,999";
  std::string rhos = "0,0.0003,0.0006,0.0009,0.0012,0.0015,0.0018";
  std::string methods = "icl,ogda,eg";
  double eps = 1e-7;
  int threads = 0;
  std::size_t n = 0, m = 0, nnz = 0;
  std::string out = "bench.csv";
  std::string summary;
  std::string manifest;
};

int cmd_bench(const BenchArgs& a, const std::string& command_line) {
  nzsg::BenchConfig cfg;
  if (a.table != "t1" && a.table != "t4") throw nzsg::PreconditionError("--table must be t1 or t4");
  if (a.scale != "desk" && a.scale != "paper") throw nzsg::PreconditionError("--scale must be desk or paper");
  cfg.table = a.table == "t1" ? nzsg::Table::t1 : nzsg::Table::t4;
  cfg.scale = a.scale == "desk" ? nzsg::Scale::desk : nzsg::Scale::paper;
  cfg.seeds = parse_list<std::uint64_t>(a.seeds);
  cfg.rhos = parse_list<double>(a.rhos);
  cfg.methods.clear();
  for (const auto& s : parse_list<std::string>(a.methods)) cfg.methods.push_back(nzsg::parse_method(s));
  cfg.run.eps = a.eps;
  cfg.threads = a.threads;
  cfg.n = a.n;
  cfg.m = a.m;
  cfg.nnz = a.nnz;
  const auto res = nzsg::run_bench(cfg);
  nzsg::write_file(a.out, nzsg::runs_csv(res));
  const std::string summary = a.summary.empty() ? a.out + ".summary.csv" : a.summary;
  const std::string manifest = a.manifest.empty() ? a.out + ".manifest.json" : a.manifest;
  nzsg::write_file(summary, nzsg::summary_csv(res));
  nzsg::write_file(manifest, nzsg::manifest_json(res, command_line).dump(2) + "\n");
  std::printf("%-5s %-8s %5s %14s %12s %6s\n", "method", "rho", "runs", "queries_h", "2sigma", "failed");
  int failed = 0;
  for (const auto& c : res.cells) {
    std::printf("%-5s %-8g %5d %14.1f %12.1f %6d\n", nzsg::to_string(c.method), c.rho, c.runs, c.queries_h_mean,
                c.queries_h_2sigma, c.failed);
    failed += c.failed;
  }
  std::printf("runs: %s\nsummary: %s\nmanifest: %s\nwall: %.1f s\n", a.out.c_str(), summary.c_str(),
              manifest.c_str(), res.wall_seconds);
  return failed ? kNoConvergence : kOk;
}

struct GapArgs {
  std::string instance;
  std::string builtin;
  std::string point;
  double rho = 0.0;
  int budget = nzsg::kDefaultGapBudget;
};

nzsg::GameSpec gap_game(const GapArgs& a) {
  if (!a.builtin.empty()) {
    if (a.builtin == "matching-pennies") return nzsg::to_game_spec(nzsg::matching_pennies());
    if (a.builtin == "stackelberg") return nzsg::stackelberg_example();
    throw nzsg::PreconditionError("unknown builtin game: " + a.builtin);
  }
  const auto file = nzsg::load_instance(a.instance);
  const auto mg = file.experiment.game(a.rho);
  // Same equilibria and deviation gains; the reformulated coupling part is
  // jointly convex, which keeps the potential-gap maximization concave.
  try {
    return nzsg::reformulate_bilinear(mg).spec;
  } catch (const nzsg::PreconditionError&) {
    return nzsg::to_game_spec(mg);
  }
}

int cmd_gap(const GapArgs& a) {
  if (a.instance.empty() == a.builtin.empty()) throw nzsg::PreconditionError("give exactly one of --instance, --builtin");
  const nzsg::GameSpec game = gap_game(a);
  nzsg::JointPoint z;
  try {
    z = nzsg::point_from_json(nlohmann::json::parse(nzsg::read_file(a.point)));
  } catch (const nlohmann::json::exception& ex) {
    throw nzsg::FormatError(std::string("point file: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw nzsg::FormatError(std::string("point file: ") + ex.what());
  }
  if (!nzsg::feasible(game, z, 1e-8)) throw nzsg::PreconditionError("point is infeasible for this game");
  const auto b = nzsg::potential_gap_bounds(game, z, a.budget);
  const auto d = nzsg::deviation_report(game, z, a.budget);
  std::printf("potential_gap %.12g\npotential_gap_upper %.12g\ndeviation_gain %.12g\ndeviation_gain_upper %.12g\n"
              "method %s\n",
              b.lower, b.upper, d.total, d.upper, nzsg::to_string(d.method));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"near-zero-sum game solvers"};
  app.require_subcommand(1);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "write a random sparse payoff instance");
  gen->add_option("--n", ga.n, "columns (x dimension)");
  gen->add_option("--m", ga.m, "rows (y dimension)");
  gen->add_option("--nnz", ga.nnz, "stored entries");
  gen->add_option("--seed", ga.seed);
  gen->add_option("--mu", ga.mu);
  gen->add_option("--nu", ga.nu);
  gen->add_flag("--normalize,!--no-normalize", ga.normalize, "scale to unit spectral norm (default on)");
  gen->add_option("--out", ga.out)->required();

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "solve one fee game");
  solve->add_option("--method", sa.method)->check(CLI::IsMember({"icl", "ogda", "eg"}));
  solve->add_option("--instance", sa.instance)->required();
  solve->add_option("--rho", sa.rho);
  solve->add_option("--eps", sa.eps);
  solve->add_option("--max-iter", sa.max_iter);
  solve->add_option("--out", sa.out, "report JSON path");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "fee sweep over seeds and methods");
  bench->add_option("--table", ba.table)->check(CLI::IsMember({"t1", "t4"}));
  bench->add_option("--scale", ba.scale)->check(CLI::IsMember({"desk", "paper"}));
  bench->add_option("--seeds", ba.seeds, "comma-separated");
  bench->add_option("--rho-list", ba.rhos, "comma-separated");
  bench->add_option("--methods", ba.methods, "comma-separated subset of icl,ogda,eg");
  bench->add_option("--eps", ba.eps);
  bench->add_option("--threads", ba.threads, "overrides NZS_THREADS");
  bench->add_option("--n", ba.n);
  bench->add_option("--m", ba.m);
  bench->add_option("--nnz", ba.nnz);
  bench->add_option("--out", ba.out, "per-run CSV");
  bench->add_option("--summary", ba.summary, "per-cell CSV");
  bench->add_option("--manifest", ba.manifest, "run manifest JSON");

  GapArgs pa;
  auto* gap = app.add_subcommand("gap", "potential gap and deviation gain at a point");
  gap->add_option("--instance", pa.instance);
  gap->add_option("--builtin", pa.builtin, "matching-pennies | stackelberg");
  gap->add_option("--point", pa.point)->required();
  gap->add_option("--rho", pa.rho);
  gap->add_option("--budget", pa.budget);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_generate(ga);
    if (*solve) return cmd_solve(sa);
    if (*bench) return cmd_bench(ba, join_args(argc, argv));
    if (*gap) return cmd_gap(pa);
  } catch (const nzsg::ConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNoConvergence;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
