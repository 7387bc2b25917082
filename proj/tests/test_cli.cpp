#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "levy_gibbs/experiment.hpp"
#include "levy_gibbs/gibbs_posterior.hpp"
#include "levy_gibbs/io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace levy;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("levy_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct Cleanup {
  Cleanup() { scratch(); }
  ~Cleanup() { fs::remove_all(scratch()); }
} cleanup;

std::string path(const std::string& name) { return (scratch() / name).string(); }

int run(const std::string& args) {
  const std::string cmd = std::string(LEVY_CLI) + " " + args + " >" + path("stdout.txt") + " 2>" + path("stderr.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const std::string& file, const std::string& text) { std::ofstream(file) << text; }

std::vector<nlohmann::json> jsonl(const std::string& file) {
  std::vector<nlohmann::json> rows;
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
  return rows;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("") == 2);
  CHECK(run("--help") == 0);
  CHECK(run("simulate --out " + path("x.txt") + " --bogus") == 2);
  CHECK(run("simulate --delta -1 --n 10 --out " + path("x.txt")) == 2);
  CHECK(run("simulate --j 1 --n 10 --out " + path("x.txt")) == 2);
  CHECK(run("simulate --delta 0.01 --n 10 --process cpois --lambda 1 --jump cauchy:1 --out " + path("x.txt")) == 2);
  CHECK(run("estimate --in " + path("missing.txt")) == 3);
  write(path("junk.txt"), "# delta=0.01\n0.1\nzz\n");
  CHECK(run("estimate --in " + path("junk.txt")) == 3);
  CHECK(slurp(path("stderr.txt")).find("line 3") != std::string::npos);
  write(path("junk.json"), "{\"basis\": ");
  CHECK(run("posterior --coefficients " + path("junk.json")) == 3);
  CHECK(run("--config " + path("missing.cfg") + " check --j 1") == 3);
  CHECK(run("experiment --j 1 --max-increments 1000 --out-dir " + path("e")) == 4);
  CHECK(run("experiment --j 1 --draws 100000000 --out-dir " + path("e")) == 4);
}

TEST_CASE("simulate output") {
  REQUIRE(run("simulate --sigma 0 --mu 0 --delta 0.01 --n 50 --out " + path("zero.txt")) == 0);
  std::ifstream zin(path("zero.txt"));
  const auto zero = io::read_increments(zin);
  CHECK(zero.values == std::vector<double>(50, 0.0));

  // Stdout carries only the data.
  REQUIRE(run("simulate --delta 0.01 --n 20 --seed 4 --out -") == 0);
  std::istringstream sin(slurp(path("stdout.txt")));
  CHECK(io::read_increments(sin).values.size() == 20);

  REQUIRE(run("simulate --process cpois --lambda 50 --jump point:0.01 --delta 0.01 --n 100000 --seed 2 --out " +
              path("cp.txt")) == 0);
  std::ifstream cin(path("cp.txt"));
  const auto cp = io::read_increments(cin);
  // Mean lambda delta c, variance lambda delta c^2.
  const double se = std::sqrt(50 * 0.01 * 1e-4 / 100000.0);
  CHECK(std::abs(oracle::mean(cp.values) - 0.005) < 4 * se);
}

TEST_CASE("repeated runs are byte-identical") {
  const std::string common = "experiment --j 1 --draws 50 --seed 11 --out-dir ";
  REQUIRE(run(common + path("r1")) == 0);
  REQUIRE(run(common + path("r2")) == 0);
  for (const char* f : {"report.json", "errors.csv", "k_posterior.csv", "band.csv"}) {
    const auto a = slurp(path(std::string("r1/") + f));
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(path(std::string("r2/") + f)));
  }
  REQUIRE(run("simulate --j 1 --seed 5 --out " + path("s1.txt")) == 0);
  REQUIRE(run("simulate --j 1 --seed 5 --out " + path("s2.txt")) == 0);
  CHECK(slurp(path("s1.txt")) == slurp(path("s2.txt")));
}

TEST_CASE("report layout") {
  REQUIRE(run("experiment --j 1 --draws 50 --seed 11 --out-dir " + path("r1")) == 0);
  const auto doc = nlohmann::json::parse(slurp(path("r1/report.json")));
  CHECK(doc["seed"] == 11);
  REQUIRE(doc["regimes"].size() == 1);
  CHECK(doc["regimes"][0]["regime"]["n"] == 160000);
  CHECK_FALSE(doc["regimes"][0].contains("runtime_seconds"));
  CHECK(doc["no_overfit"][0]["K_n"] == 2);
  CHECK(doc["no_overfit"][0]["threshold"] == 4.0);
}

TEST_CASE("flags override config values") {
  write(path("study.cfg"), "# shared settings\nseed = 5\ndraws = 20\nfixed-K = 3\nj = 1\n");
  REQUIRE(run("simulate --j 1 --seed 1 --out " + path("inc.txt")) == 0);
  REQUIRE(run("estimate --in " + path("inc.txt") + " --K 6 --out " + path("c.json")) == 0);
  REQUIRE(run("--config " + path("study.cfg") + " posterior --coefficients " + path("c.json") + " --seed 9 --out-dir " +
              path("pc")) == 0);
  REQUIRE(run("posterior --coefficients " + path("c.json") + " --seed 9 --draws 20 --fixed-K 3 --out-dir " + path("pd")) == 0);
  CHECK(slurp(path("pc/draws.jsonl")) == slurp(path("pd/draws.jsonl")));
  REQUIRE(run("posterior --coefficients " + path("c.json") + " --seed 5 --draws 20 --fixed-K 3 --out-dir " + path("pe")) == 0);
  CHECK(slurp(path("pc/draws.jsonl")) != slurp(path("pe/draws.jsonl")));
  CHECK(jsonl(path("pc/draws.jsonl")).size() == 20);
}

TEST_CASE("simulate then estimate reproduces the experiment coefficients") {
  REQUIRE(run("simulate --j 1 --seed 13 --out " + path("j1.txt")) == 0);
  REQUIRE(run("estimate --in " + path("j1.txt") + " --out " + path("j1.json")) == 0);
  const auto theta = io::coefficients_from_json(nlohmann::json::parse(slurp(path("j1.json"))));
  ExperimentOptions opt;
  opt.num_draws = 10;
  const auto report = run_regime(RegimeSpec::from_index(1), opt, 13);
  REQUIRE(theta.size() == report.theta_hat.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    CHECK(theta.values[k] == doctest::Approx(report.theta_hat.values[k]).epsilon(1e-12));
  }
  CHECK(theta.horizon == doctest::Approx(20.0));
}

TEST_CASE("posterior draws") {
  const CoefficientVector hat(BasisSystem::trigonometric(Window{0.005, 0.015}, 10),
                              {1500, 300, -200, 100, 50, -40, 20, 10, 5, 1}, CoefficientRole::empirical, 80.0);
  write(path("hat.json"), io::to_json(hat).dump());
  REQUIRE(run("posterior --coefficients " + path("hat.json") + " --fixed-K 8 --draws 200 --out-dir " + path("f8")) == 0);
  for (const auto& row : jsonl(path("f8/draws.jsonl"))) {
    REQUIRE(row["K"] == 8);
    REQUIRE(row["theta"].size() == 8);
  }

  const std::size_t n = 100000;
  REQUIRE(run("posterior --coefficients " + path("hat.json") + " --fixed-K 1 --draws 100000 --out-dir " +
              path("f1")) == 0);
  std::vector<double> first;
  for (const auto& row : jsonl(path("f1/draws.jsonl"))) first.push_back(row["theta"][0].get<double>());
  REQUIRE(first.size() == n);
  const auto post = conditional_posterior(std::vector<double>{1500.0}, 80.0, GibbsConfig{});
  CHECK(std::abs(oracle::mean(first) - post.means[0]) < 4 * std::sqrt(post.variance / n));
  CHECK(std::abs(oracle::variance(first) - post.variance) < 4 * post.variance * std::sqrt(2.0 / (n - 1)));

  REQUIRE(run("posterior --coefficients " + path("hat.json") + " --draws 50 --tag 2 --out-dir " + path("pk")) == 0);
  std::istringstream k(slurp(path("pk/k_posterior.csv")));
  std::string line;
  std::getline(k, line);
  CHECK(line == "j,K,prob");
  std::getline(k, line);
  CHECK(line.rfind("2,1,", 0) == 0);
}

TEST_CASE("check subcommand") {
  REQUIRE(run("check --j 3") == 0);
  auto doc = nlohmann::json::parse(slurp(path("stdout.txt")));
  CHECK(doc["delta_check"]["pass"] == true);
  CHECK(doc["delta_check"]["n_delta_5_3"].get<double>() <= 0.05 * (1 + 1e-9));
  REQUIRE(run("check --j 1 --beta 0") == 0);
  doc = nlohmann::json::parse(slurp(path("stdout.txt")));
  CHECK(doc["config_check"]["beta_condition"] == false);
  REQUIRE(run("check --j 1 --tau 3") == 0);
  doc = nlohmann::json::parse(slurp(path("stdout.txt")));
  CHECK(doc["config_check"]["beta_condition"] == true);
  CHECK(doc["config_check"]["no_overfit_condition"] == true);
}
