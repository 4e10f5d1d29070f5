#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "fpc/hinge_prox.hpp"

namespace fs = std::filesystem;
using fpc::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args, const fpc::cli::Hooks& hooks = {}) {
  std::ostringstream out, err;
  const int code = run(args, out, err, hooks);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Fresh directory per test case, removed afterwards.
struct Scratch {
  fs::path dir;
  Scratch() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("fpc_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes two files with the requested flips") {
  Scratch s;
  const Result r = call({"simulate", "--m", "1000", "--mtest", "1000", "--noise", "global:0.10", "--seed",
                         "7", "--train-out", s / "train.csv", "--test-out", s / "test.csv"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("flips").get<int>() == 100);
  CHECK(j.contains("train_positive_fraction"));
  CHECK(fs::exists(s / "train.csv"));
  CHECK(fs::exists(s / "test.csv"));

  const std::string first = slurp(s / "train.csv");
  REQUIRE(call({"simulate", "--m", "1000", "--mtest", "1000", "--noise", "global:0.10", "--seed", "7",
                "--train-out", s / "train.csv", "--test-out", s / "test.csv"})
              .code == 0);
  CHECK(slurp(s / "train.csv") == first);

  const Result clean = call({"simulate", "--m", "200", "--noise", "global:0", "--train-out", s / "c.csv",
                             "--test-out", s / "ct.csv"});
  CHECK(nlohmann::json::parse(clean.out).at("flips").get<int>() == 0);
}

TEST_CASE("full pipeline: train, evaluate, predict") {
  Scratch s;
  REQUIRE(call({"simulate", "--seed", "3", "--train-out", s / "train.csv", "--test-out", s / "test.csv"}).code == 0);
  const Result tr = call({"train", "--data", s / "train.csv", "--out", s / "m.fpc", "--trace", s / "trace.csv"});
  REQUIRE(tr.code == 0);
  const auto summary = nlohmann::json::parse(tr.out);
  CHECK(summary.at("centers").get<int>() == 55);
  CHECK(summary.at("iterations").get<int>() <= 5);
  CHECK(slurp(s / "trace.csv").rfind("iter,objective,h_step_sq,primal_residual\n", 0) == 0);

  const Result ev = call({"evaluate", "--model", s / "m.fpc", "--data", s / "test.csv"});
  REQUIRE(ev.code == 0);
  const auto report = nlohmann::json::parse(ev.out);
  CHECK(report.at("TestAcc").get<double>() > 96.0);
  CHECK(report.at("sparsity").get<int>() == 55);

  const Result csv = call({"evaluate", "--model", s / "m.fpc", "--data", s / "test.csv", "--format", "csv"});
  CHECK(csv.out.rfind("TestAcc,TrainTime,TestTime,sparsity", 0) == 0);

  const Result pr = call({"predict", "--model", s / "m.fpc", "--data", s / "test.csv", "--out", s / "p.csv"});
  REQUIRE(pr.code == 0);
  std::istringstream lines(slurp(s / "p.csv"));
  std::string line;
  int count = -1;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 1000);
}

TEST_CASE("tight model on noisy training data recovers the noise level") {
  Scratch s;
  REQUIRE(call({"simulate", "--seed", "4", "--noise", "global:0.2", "--train-out", s / "train.csv",
                "--test-out", s / "test.csv"}).code == 0);
  REQUIRE(call({"train", "--data", s / "train.csv", "--out", s / "m.fpc", "--tol", "1e-6", "--max-iters",
                "100000"}).code == 0);
  const auto report = nlohmann::json::parse(call({"evaluate", "--model", s / "m.fpc", "--data", s / "train.csv"}).out);
  CHECK(std::abs((100.0 - report.at("TestAcc").get<double>()) - 20.0) <= 2.0);
}

TEST_CASE("select-degree reports every candidate") {
  Scratch s;
  REQUIRE(call({"simulate", "--seed", "5", "--train-out", s / "train.csv", "--test-out", s / "test.csv"}).code == 0);
  const Result r = call({"select-degree", "--data", s / "train.csv", "--degrees", "2-4", "--out", s / "best.fpc"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("candidates").size() == 3);
  CHECK(j.at("candidates")[0].at("n").get<int>() == 6);
  CHECK(j.at("best_degree").get<int>() >= 2);
  CHECK(j.at("best_degree").get<int>() <= 4);
  CHECK(j.contains("test"));
  CHECK(fs::exists(s / "best.fpc"));

  const Result v = call({"select-degree", "--data", s / "train.csv", "--validation", s / "test.csv",
                         "--degrees", "3,9"});
  REQUIRE(v.code == 0);
  CHECK(nlohmann::json::parse(v.out).at("validation_size").get<int>() == 1000);
}

TEST_CASE("bench emits a CSV table") {
  const Result r = call({"bench", "--sizes", "500,1000", "--degrees", "3", "--reps", "2", "--mtest", "100"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "m,s,n,rep,iterations,train_seconds,test_accuracy");
  int rows = 0;
  std::string line;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 4);
  // Accuracy columns are reproducible.
  const Result again = call({"bench", "--sizes", "500,1000", "--degrees", "3", "--reps", "2", "--mtest", "100"});
  auto last_column = [](const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ls(text);
    std::string l;
    while (std::getline(ls, l)) out.push_back(l.substr(l.rfind(',') + 1));
    return out;
  };
  CHECK(last_column(r.out) == last_column(again.out));
}

TEST_CASE("verify passes by default and fails with a broken prox") {
  const Result ok = call({"verify", "--prox-cases", "2000", "--monotone-instances", "5", "--lp-instances", "3"});
  CHECK(ok.code == 0);
  const auto j = nlohmann::json::parse(ok.out);
  CHECK(j.at("pass").get<bool>());
  CHECK(j.at("checks").size() == 4);
  for (const auto& c : j.at("checks")) {
    if (c.at("name") == "duality_gap") CHECK(c.at("worst").get<double>() < 1e-6);
  }

  fpc::cli::Hooks hooks;
  // Middle branch returns b instead of 1/a.
  hooks.prox = [](double a, double b, double gamma) {
    if (a != 0.0 && a * b > 1.0 - a * a / gamma && a * b < 1.0) return b;
    return fpc::hinge_scalar(a, b, gamma);
  };
  const Result bad = call({"verify", "--prox-cases", "2000", "--monotone-instances", "2", "--lp-instances",
                           "1", "--tol", "1e-6"},
                          hooks);
  CHECK(bad.code == fpc::cli::kVerifyFailed);
  const auto jb = nlohmann::json::parse(bad.out);
  CHECK_FALSE(jb.at("pass").get<bool>());
  CHECK_FALSE(jb.at("checks")[0].at("pass").get<bool>());
  CHECK(jb.at("checks")[0].contains("first_violation"));
}

TEST_CASE("error classes map to distinct exit codes") {
  Scratch s;
  { std::ofstream(s / "empty.csv"); }
  { std::ofstream(s / "bad.csv") << "0.1,0.2,1\n0.3,oops,-1\n"; }
  { std::ofstream(s / "junk.fpc") << "not a model"; }
  REQUIRE(call({"simulate", "--m", "100", "--train-out", s / "t.csv", "--test-out", s / "u.csv"}).code == 0);
  REQUIRE(call({"train", "--data", s / "t.csv", "--out", s / "m.fpc", "--degree", "2"}).code == 0);

  CHECK(call({"evaluate", "--model", s / "m.fpc", "--data", s / "empty.csv"}).code == fpc::cli::kEmptyData);
  const Result bad = call({"train", "--data", s / "bad.csv"});
  CHECK(bad.code == fpc::cli::kDataFormat);
  CHECK(bad.err.find("line 2") != std::string::npos);
  CHECK(call({"train", "--data", s / "missing.csv"}).code == fpc::cli::kIo);
  CHECK(call({"evaluate", "--model", s / "junk.fpc", "--data", s / "t.csv"}).code == fpc::cli::kModelFormat);
  CHECK(call({"train", "--data", s / "t.csv", "--alpha", "-1"}).code == fpc::cli::kUsage);
  CHECK(call({"frobnicate"}).code == fpc::cli::kUsage);
  CHECK(call({}).code == fpc::cli::kUsage);
  CHECK(call({"simulate", "--noise", "global:2", "--train-out", s / "a.csv", "--test-out", s / "b.csv"}).code ==
        fpc::cli::kInvalidArgument);
  { std::ofstream(s / "three.csv") << "0.1,0.2,0.3\n"; }
  CHECK(call({"predict", "--model", s / "m.fpc", "--data", s / "three.csv", "--features-only"}).code ==
        fpc::cli::kDimensionMismatch);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("config file supplies defaults that flags override") {
  Scratch s;
  REQUIRE(call({"simulate", "--m", "300", "--train-out", s / "t.csv", "--test-out", s / "u.csv"}).code == 0);
  { std::ofstream(s / "cfg.toml") << "[train]\ndegree = 3\nmax-iters = 40\ntol = 1e-12\n"; }
  const auto from_file = nlohmann::json::parse(
      call({"--config", s / "cfg.toml", "train", "--data", s / "t.csv", "--out", s / "m.fpc"}).out);
  CHECK(from_file.at("degree").get<int>() == 3);
  CHECK(from_file.at("max_iters").get<int>() == 40);
  const auto overridden = nlohmann::json::parse(
      call({"--config", s / "cfg.toml", "train", "--data", s / "t.csv", "--out", s / "m.fpc", "--degree", "5"}).out);
  CHECK(overridden.at("degree").get<int>() == 5);
  CHECK(overridden.at("max_iters").get<int>() == 40);
  const auto defaults = nlohmann::json::parse(call({"train", "--data", s / "t.csv", "--out", s / "m.fpc"}).out);
  CHECK(defaults.at("degree").get<int>() == 9);
  CHECK(defaults.at("max_iters").get<int>() == 5);
  CHECK(defaults.at("alpha").get<double>() == 1.0);
  CHECK(defaults.at("scheme").get<std::string>() == "firstn");

  { std::ofstream(s / "typo.toml") << "[train]\ndegre = 3\n"; }
  CHECK(call({"--config", s / "typo.toml", "train", "--data", s / "t.csv"}).code == fpc::cli::kUsage);
}

}  // TEST_SUITE
