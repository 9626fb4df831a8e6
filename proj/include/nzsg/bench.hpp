#ifndef NZSG_BENCH_HPP
#define NZSG_BENCH_HPP

// Fee-sweep benchmark: methods x fee levels x seeds on random sparse
// matrix games, with per-run records, per-cell summaries and a manifest.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nzsg/icl.hpp"
#include "nzsg/instances.hpp"
#include "nzsg/io.hpp"
#include "nzsg/saddle.hpp"

namespace nzsg {

enum class Method { icl, ogda, eg };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::icl: return "icl";
    case Method::ogda: return "ogda";
    case Method::eg: return "eg";
  }
  return "unknown";
}

inline Method parse_method(const std::string& s) {
  if (s == "icl") return Method::icl;
  if (s == "ogda") return Method::ogda;
  if (s == "eg") return Method::eg;
  throw PreconditionError("unknown method: " + s);
}

struct RunRecord {
  Method method = Method::icl;
  double rho = 0.0;
  std::uint64_t seed = 0;
  double eps = 0.0;
  QueryLedger ledger;
  long long iterations = 0;
  std::optional<double> certified_sq_distance;
  SolveStatus status = SolveStatus::error;
  std::string message;
  double wall_ms = 0.0;
  JointPoint point;
  std::string instance_hash;

  bool ok() const noexcept { return status == SolveStatus::converged; }
  long long queries_h() const noexcept { return reported_h(ledger); }
  long long queries_total() const noexcept { return ledger.total(); }
};

struct RunOptions {
  double eps = 1e-7;
  long long max_iter = 20'000'000;
  int certificate_period = 8;
};

// One solve of the fee game built from experiment e at fee rho. The ICL path
// reformulates the game first; the baselines solve it directly.
inline RunRecord run_method(Method method, const SparseExperiment& e, double rho, const RunOptions& opt = {}) {
  RunRecord r;
  r.method = method;
  r.rho = rho;
  r.seed = e.seed;
  r.eps = opt.eps;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const MatrixGame mg = e.game(rho);
    SolveReport rep;
    if (method == Method::icl) {
      const ReformulatedGame rf = reformulate_bilinear(mg);
      IclOptions io;
      io.check_period = opt.certificate_period;
      rep = solve_icl(rf.spec, opt.eps, io);
    } else {
      SolverConfig cfg;
      cfg.epsilon = opt.eps;
      cfg.max_iter = opt.max_iter;
      cfg.certificate_period = opt.certificate_period;
      const GameSpec spec = to_game_spec(mg);
      rep = method == Method::eg ? solve_eg(spec, cfg) : solve_ogda(spec, cfg);
    }
    r.ledger = rep.ledger;
    r.iterations = rep.iterations;
    r.certified_sq_distance = rep.certified_sq_distance;
    r.status = rep.status;
    r.message = rep.message;
    r.point = std::move(rep.point);
  } catch (const std::exception& ex) {
    r.status = SolveStatus::error;
    r.message = ex.what();
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline nlohmann::json report_json(const RunRecord& r, bool with_point = true) {
  nlohmann::json j = {{"method", to_string(r.method)},
                      {"rho", r.rho},
                      {"eps", r.eps},
                      {"seed", r.seed},
                      {"queries_h", r.queries_h()},
                      {"queries_g", r.ledger.g_queries},
                      {"queries_cert", r.ledger.cert_queries},
                      {"ledger", to_json(r.ledger)},
                      {"iterations", r.iterations},
                      {"certified_sq_distance", nullptr},
                      {"status", to_string(r.status)},
                      {"message", r.message},
                      {"wall_ms", r.wall_ms}};
  if (r.certified_sq_distance) j["certified_sq_distance"] = *r.certified_sq_distance;
  if (!r.instance_hash.empty()) j["instance_fnv1a"] = r.instance_hash;
  if (with_point && !r.point.x.empty()) j["point"] = to_json(r.point);
  return j;
}

enum class Table { t1, t4 };
enum class Scale { desk, paper };

struct BenchConfig {
  Table table = Table::t1;
  Scale scale = Scale::desk;
  std::vector<std::uint64_t> seeds = {0, 111, 222, 333, 444, 555, 666, 777, 888, 999};
  std::vector<double> rhos = {0.0, 0.0003, 0.0006, 0.0009, 0.0012, 0.0015, 0.0018};
  std::vector<Method> methods = {Method::icl, Method::ogda, Method::eg};
  RunOptions run;
  int threads = 0;  // 0: NZS_THREADS or hardware concurrency
  // Overrides of the scale defaults (0 keeps the default).
  std::size_t n = 0, m = 0, nnz = 0;

  double mu() const { return 1e-4; }
  double nu() const { return table == Table::t1 ? 1.0 : 0.01; }
  std::size_t dim_n() const { return n ? n : (scale == Scale::desk ? 1000 : 10000); }
  std::size_t dim_m() const { return m ? m : (scale == Scale::desk ? 1000 : 10000); }
  std::size_t dim_nnz() const { return nnz ? nnz : (scale == Scale::desk ? 10000 : 100000); }
};

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NZS_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

struct CellSummary {
  Method method = Method::icl;
  double rho = 0.0;
  int runs = 0;
  int failed = 0;
  double queries_h_mean = 0.0;
  double queries_h_2sigma = 0.0;
  double queries_total_mean = 0.0;
  double queries_total_2sigma = 0.0;
  double iterations_mean = 0.0;
  long long queries_total_sum = 0;
};

struct BenchResult {
  BenchConfig config;
  std::vector<RunRecord> records;  // method-major, then rho, then seed
  std::vector<CellSummary> cells;  // method-major, then rho
  std::map<std::uint64_t, std::string> instance_hashes;
  double wall_seconds = 0.0;

  const CellSummary& cell(Method m, double rho) const {
    for (const auto& c : cells)
      if (c.method == m && c.rho == rho) return c;
    throw PreconditionError("bench: no such cell");
  }
};

namespace detail {

// Mean and twice the sample standard deviation.
inline std::pair<double, double> mean_2sigma(const std::vector<double>& v) {
  if (v.empty()) return {std::nan(""), std::nan("")};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, 2.0 * std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace detail

inline std::vector<CellSummary> summarize(const std::vector<RunRecord>& records, const std::vector<Method>& methods,
                                          const std::vector<double>& rhos) {
  std::vector<CellSummary> out;
  for (Method m : methods)
    for (double rho : rhos) {
      CellSummary c;
      c.method = m;
      c.rho = rho;
      std::vector<double> qh, qt, it;
      for (const auto& r : records) {
        if (r.method != m || r.rho != rho) continue;
        ++c.runs;
        if (!r.ok()) {
          ++c.failed;
          continue;
        }
        qh.push_back(static_cast<double>(r.queries_h()));
        qt.push_back(static_cast<double>(r.queries_total()));
        it.push_back(static_cast<double>(r.iterations));
        c.queries_total_sum += r.queries_total();
      }
      std::tie(c.queries_h_mean, c.queries_h_2sigma) = detail::mean_2sigma(qh);
      std::tie(c.queries_total_mean, c.queries_total_2sigma) = detail::mean_2sigma(qt);
      c.iterations_mean = detail::mean_2sigma(it).first;
      out.push_back(c);
    }
  return out;
}

inline BenchResult run_bench(const BenchConfig& cfg) {
  if (cfg.seeds.empty() || cfg.rhos.empty() || cfg.methods.empty())
    throw PreconditionError("bench: seeds, fee list and methods must be nonempty");
  const auto t0 = std::chrono::steady_clock::now();
  const int threads = resolve_threads(cfg.threads);
  BenchResult res;
  res.config = cfg;

  std::vector<SparseExperiment> exps(cfg.seeds.size());
  std::vector<std::string> hashes(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), threads, [&](std::size_t i) {
    exps[i] = gen_sparse_experiment(cfg.dim_n(), cfg.dim_m(), cfg.dim_nnz(), cfg.seeds[i], cfg.mu(), cfg.nu(), true);
    hashes[i] = detail::hex64(detail::fnv1a(encode_matrix(exps[i].M)));
  });
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) res.instance_hashes[cfg.seeds[i]] = hashes[i];

  const std::size_t S = cfg.seeds.size(), R = cfg.rhos.size();
  res.records.resize(cfg.methods.size() * R * S);
  parallel_for(res.records.size(), threads, [&](std::size_t k) {
    const std::size_t mi = k / (R * S), ri = (k / S) % R, si = k % S;
    RunRecord r = run_method(cfg.methods[mi], exps[si], cfg.rhos[ri], cfg.run);
    r.instance_hash = hashes[si];
    r.point = {};  // keep memory flat across large sweeps
    res.records[k] = std::move(r);
  });
  res.cells = summarize(res.records, cfg.methods, cfg.rhos);
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline constexpr const char* kRunCsvHeader =
    "method,rho,seed,queries_h,queries_g,queries_cert,iterations,certified_sq_distance,wall_ms";

inline std::string runs_csv(const BenchResult& res) {
  std::ostringstream os;
  os << kRunCsvHeader << "\n";
  for (const auto& r : res.records) {
    os << to_string(r.method) << ',' << format_double(r.rho) << ',' << r.seed << ',' << r.queries_h() << ','
       << r.ledger.g_queries << ',' << r.ledger.cert_queries << ',' << r.iterations << ',';
    if (!r.ok())
      os << "failed";
    else
      os << format_double(r.certified_sq_distance.value_or(std::nan("")));
    os << ',' << format_double(std::round(r.wall_ms * 1000.0) / 1000.0) << "\n";
  }
  return os.str();
}

inline constexpr const char* kSummaryCsvHeader =
    "method,rho,runs,failed,queries_h_mean,queries_h_2sigma,queries_total_mean,queries_total_2sigma,"
    "iterations_mean";

inline std::string summary_csv(const BenchResult& res) {
  std::ostringstream os;
  os << kSummaryCsvHeader << "\n";
  for (const auto& c : res.cells)
    os << to_string(c.method) << ',' << format_double(c.rho) << ',' << c.runs << ',' << c.failed << ','
       << format_double(c.queries_h_mean) << ',' << format_double(c.queries_h_2sigma) << ','
       << format_double(c.queries_total_mean) << ',' << format_double(c.queries_total_2sigma) << ','
       << format_double(c.iterations_mean) << "\n";
  return os.str();
}

inline nlohmann::json manifest_json(const BenchResult& res, const std::string& command_line) {
  const auto& cfg = res.config;
  nlohmann::json j;
  j["command_line"] = command_line;
  j["table"] = cfg.table == Table::t1 ? "t1" : "t4";
  j["scale"] = cfg.scale == Scale::desk ? "desk" : "paper";
  j["seeds"] = cfg.seeds;
  j["rhos"] = cfg.rhos;
  j["instance"] = {{"n", cfg.dim_n()}, {"m", cfg.dim_m()}, {"nnz", cfg.dim_nnz()}, {"mu", cfg.mu()},
                   {"nu", cfg.nu()},   {"normalized", true}};
  nlohmann::json hashes = nlohmann::json::object();
  for (const auto& [seed, h] : res.instance_hashes) hashes[std::to_string(seed)] = h;
  j["instance_fnv1a"] = hashes;
  j["solver"] = {{"eps", cfg.run.eps},
                 {"max_iter", cfg.run.max_iter},
                 {"certificate_period", cfg.run.certificate_period},
                 {"eg_gamma", "1/(sqrt(2) L)"},
                 {"ogda_gamma", "1/(2 L)"},
                 {"icl_inner", "primal-dual, adaptive primal weight"}};
  j["wall_seconds"] = res.wall_seconds;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : res.cells) {
    QueryLedger tot;
    for (const auto& r : res.records)
      if (r.method == c.method && r.rho == c.rho && r.ok()) tot += r.ledger;
    cells.push_back({{"method", to_string(c.method)},
                     {"rho", c.rho},
                     {"runs", c.runs},
                     {"failed", c.failed},
                     {"ledger_total", to_json(tot)},
                     {"queries_total", tot.total()}});
  }
  j["cells"] = cells;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : res.records) runs.push_back(report_json(r, false));
  j["runs"] = runs;
  return j;
}

}  // namespace nzsg

#endif
