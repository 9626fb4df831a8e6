#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "nzsg/io.hpp"

using namespace nzsg;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "nzsg_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(NZSG_CLI) + " " + args + " > " + (kDir / "stdout.txt").string() + " 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string path(const std::string& name) { return (kDir / name).string(); }

std::string stdout_text() { return read_file(path("stdout.txt")); }

double field(const std::string& text, const std::string& key) {
  const auto p = text.find(key + " ");
  EXPECT_NE(p, std::string::npos) << key;
  return std::stod(text.substr(p + key.size() + 1));
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::create_directories(kDir);
    ASSERT_EQ(run("generate --n 300 --m 300 --nnz 3000 --seed 0 --out " + path("desk.inst")), 0);
  }
};

}  // namespace

TEST_F(Cli, GenerateFullScaleShape) {
  ASSERT_EQ(run("generate --n 10000 --m 10000 --nnz 100000 --seed 0 --out " + path("big.inst")), 0);
  const auto f = load_instance(path("big.inst"));
  EXPECT_EQ(f.experiment.M.nnz(), 100000u);
  EXPECT_NEAR(spectral_norm(f.experiment.M), 1.0, 1e-6);
  fs::remove(path("big.inst"));
}

TEST_F(Cli, GenerateIsIdempotent) {
  ASSERT_EQ(run("generate --n 300 --m 300 --nnz 3000 --seed 0 --out " + path("again.inst")), 0);
  EXPECT_EQ(read_file(path("again.inst")), read_file(path("desk.inst")));
}

TEST_F(Cli, GenerateRejectsTooManyEntries) {
  EXPECT_EQ(run("generate --n 10 --m 10 --nnz 101 --out " + path("bad.inst")), 2);
  EXPECT_EQ(run("generate --n 10"), 2);  // --out missing
}

TEST_F(Cli, SolveIclCertifiesTarget) {
  ASSERT_EQ(run("solve --method icl --instance " + path("desk.inst") + " --rho 0 --eps 1e-7 --out " +
                path("icl.json")),
            0);
  const auto j = nlohmann::json::parse(read_file(path("icl.json")));
  for (const char* k : {"method", "rho", "eps", "queries_h", "queries_g", "queries_cert", "iterations",
                        "certified_sq_distance", "seed"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_LE(j.at("certified_sq_distance").get<double>(), 1e-7);
  EXPECT_EQ(j.at("method"), "icl");
}

TEST_F(Cli, BaselinesAgree) {
  const double eps = 1e-9;
  ASSERT_EQ(run("solve --method eg --instance " + path("desk.inst") + " --rho 0.001 --eps 1e-9 --out " + path("eg.json")), 0);
  ASSERT_EQ(run("solve --method ogda --instance " + path("desk.inst") + " --rho 0.001 --eps 1e-9 --out " +
                path("ogda.json")),
            0);
  const auto a = point_from_json(nlohmann::json::parse(read_file(path("eg.json"))));
  const auto b = point_from_json(nlohmann::json::parse(read_file(path("ogda.json"))));
  EXPECT_LE(distance(a, b), 10.0 * std::sqrt(eps));
}

TEST_F(Cli, SolveNonConvergenceExitsOne) {
  EXPECT_EQ(run("solve --method ogda --instance " + path("desk.inst") + " --max-iter 5 --out " + path("part.json")), 1);
  const auto j = nlohmann::json::parse(read_file(path("part.json")));
  EXPECT_EQ(j.at("status"), "max_iter");
}

TEST_F(Cli, SolveUsageErrors) {
  EXPECT_EQ(run("solve --method nope --instance " + path("desk.inst")), 2);
  EXPECT_EQ(run("solve --method icl --instance " + path("missing.inst")), 2);
  EXPECT_EQ(run("solve --method icl --instance " + path("desk.inst") + " --rho 0.9"), 2);  // not certifiably monotone
}

TEST_F(Cli, GapAtAccurateSolution) {
  ASSERT_EQ(run("solve --method icl --instance " + path("desk.inst") + " --rho 0.001 --eps 1e-10 --out " +
                path("tight.json")),
            0);
  ASSERT_EQ(run("gap --instance " + path("desk.inst") + " --rho 0.001 --point " + path("tight.json")), 0);
  EXPECT_LE(field(stdout_text(), "deviation_gain"), 1e-4);
}

TEST_F(Cli, GapMatchingPenniesCenter) {
  std::ofstream(path("center.json")) << R"({"x": [0.5, 0.5], "y": [0.5, 0.5]})";
  ASSERT_EQ(run("gap --builtin matching-pennies --point " + path("center.json")), 0);
  EXPECT_EQ(field(stdout_text(), "deviation_gain"), 0.0);
}

TEST_F(Cli, GapInfeasiblePoint) {
  std::ofstream(path("off.json")) << R"({"x": [0.9, 0.5], "y": [0.5, 0.5]})";
  EXPECT_EQ(run("gap --builtin matching-pennies --point " + path("off.json")), 2);
  std::ofstream(path("junk.json")) << "not json";
  EXPECT_EQ(run("gap --builtin matching-pennies --point " + path("junk.json")), 2);
}

TEST_F(Cli, BenchWritesCsvSummaryAndManifest) {
  ASSERT_EQ(run("bench --table t1 --scale desk --n 80 --m 80 --nnz 600 --seeds 0,111 --rho-list 0,0.001 --threads 1 "
                "--out " + path("b.csv")),
            0);
  const std::string csv = read_file(path("b.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "method,rho,seed,queries_h,queries_g,queries_cert,iterations,certified_sq_distance,wall_ms");
  EXPECT_TRUE(fs::exists(path("b.csv.summary.csv")));
  EXPECT_TRUE(fs::exists(path("b.csv.manifest.json")));
  // identical numeric cells on a serial rerun, wall time aside
  ASSERT_EQ(run("bench --table t1 --scale desk --n 80 --m 80 --nnz 600 --seeds 0,111 --rho-list 0,0.001 --threads 1 "
                "--out " + path("c.csv")),
            0);
  auto strip = [](const std::string& s) {
    std::string out;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };
  EXPECT_EQ(strip(csv), strip(read_file(path("c.csv"))));
  EXPECT_EQ(run("bench --table t9"), 2);
}
