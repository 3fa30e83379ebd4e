// Drives the ssn binary end to end through the shell.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "ssn/ssn.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ssn_cli_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::mt19937_64 rng(77);
    auto c = ssn_test::random_instance(rng, 80, 6, 0.6, true);
    { std::ofstream f(dir_ / "cls.txt"); ssn::write_libsvm(f, c.data); }
    auto r = ssn_test::random_instance(rng, 80, 6, 0.6, false);
    { std::ofstream f(dir_ / "reg.txt"); ssn::write_libsvm(f, r.data); }
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  CliResult run(const std::string& args) const {
    const fs::path out = dir_ / "stdout", err = dir_ / "stderr";
    const std::string cmd = std::string("'") + SSN_CLI_PATH + "' " + args + " >'" +
                            out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, TrainWritesModelAndTrace) {
  auto r = run("train --task svc --data " + path("cls.txt").string() + " --model " +
               path("m").string() + " --trace " + path("t.csv").string() + " --json");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["status"], "converged");
  const std::size_t k = j["k"];
  const std::string trace = slurp(path("t.csv"));
  EXPECT_EQ(trace.rfind("k,residual,objective,cg_iters,active_count,active_ratio,alpha,backtracks\n", 0), 0u);
  EXPECT_EQ(count_lines(trace), k + 2);  // header + k+1 rows
  auto m = ssn::load_model(path("m").string());
  EXPECT_EQ(m.task, ssn::Task::Svc);
  EXPECT_TRUE(m.bias_appended);
  EXPECT_EQ(m.omega.size(), 7u);
}

TEST_F(Cli, PredictAndEvalAgreeWithLibrary) {
  ASSERT_EQ(run("train --task svr --data " + path("reg.txt").string() + " --C 2 --epsilon 0.05 --model " +
                path("m").string()).code, 0);
  auto p = run("predict --model " + path("m").string() + " --data " + path("reg.txt").string());
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(count_lines(p.out), 80u);

  auto e = run("eval --task svr --model " + path("m").string() + " --data " + path("reg.txt").string() +
               " --json");
  ASSERT_EQ(e.code, 0) << e.err;
  auto j = nlohmann::json::parse(e.out);

  ssn::Dataset d = ssn::load_libsvm(path("reg.txt").string());
  ssn::Model m = ssn::load_model(path("m").string());
  auto t = ssn::prepare_test(d, m.raw_features(), m.bias_appended);
  EXPECT_DOUBLE_EQ(j["value"].get<double>(), ssn::mse(m.omega, t.data).value);

  // predictions are the raw decision values, written round-trippable
  std::istringstream lines(p.out);
  std::string line;
  for (std::size_t i = 0; std::getline(lines, line); ++i)
    EXPECT_EQ(std::stod(line), t.data.x.row_dot(i, m.omega)) << "row " << i;
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("train").code, 2);
  EXPECT_EQ(run("train --task svm --data " + path("cls.txt").string()).code, 2);
  EXPECT_EQ(run("train --task svc --data " + path("cls.txt").string() + " --C 1 --C-over-l 1").code, 2);
  EXPECT_EQ(run("train --task svc --data " + path("cls.txt").string() + " --C -1").code, 2);
  EXPECT_EQ(run("train --task svr --data " + path("reg.txt").string() + " --epsilon 0").code, 2);
  // regression targets are not class labels
  EXPECT_EQ(run("train --task svc --data " + path("reg.txt").string()).code, 2);
}

TEST_F(Cli, IoErrorsExitThreeWithoutPartialModel) {
  auto r = run("train --task svc --data " + path("missing.txt").string() + " --model " + path("m").string());
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(fs::exists(path("m")));
  EXPECT_FALSE(r.err.empty());

  std::ofstream(path("bad.txt")) << "1 1:0.5\n-1 2:abc\n";
  r = run("train --task svc --data " + path("bad.txt").string() + " --model " + path("m").string());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find(":2"), std::string::npos) << r.err;  // points at the line
  EXPECT_FALSE(fs::exists(path("m")));

  EXPECT_EQ(run("predict --model " + path("nope").string() + " --data " + path("cls.txt").string()).code, 3);
}

TEST_F(Cli, NonConvergenceExitsFour) {
  auto r = run("train --task svc --data " + path("cls.txt").string() + " --C 100 --max-iter 1 --json --model " +
               path("m").string());
  EXPECT_EQ(r.code, 4);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["status"], "max_iterations");
  EXPECT_TRUE(fs::exists(path("m")));
}

TEST_F(Cli, SweepWritesOneRowPerMultiplier) {
  auto r = run("sweep --task svr --data " + path("reg.txt").string() + " --jobs 3 --out " +
               path("s.csv").string() + " --trace-dir " + path("traces").string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(path("s.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "dataset,task,C_over_l,C,cg,k,res,t,status,active_ratio,metric,metric_value,error");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 5u);
  const char* mult[] = {"0.01", "0.1", "1", "10", "100"};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(rows[i].rfind(std::string("reg.txt,svr,") + mult[i] + ",", 0), 0u) << rows[i];
    EXPECT_NE(rows[i].find(",converged,"), std::string::npos) << rows[i];
  }
  EXPECT_EQ(std::distance(fs::directory_iterator(path("traces")), fs::directory_iterator{}), 5);
}

TEST_F(Cli, SplitRunsAreReproducible) {
  const std::string args = "eval --task svc --data " + path("cls.txt").string() + " --split 0.6 --seed 5 --json";
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  auto ja = nlohmann::json::parse(a.out), jb = nlohmann::json::parse(b.out);
  EXPECT_EQ(ja["metric"]["value"], jb["metric"]["value"]);
  EXPECT_EQ(ja["final_residual"], jb["final_residual"]);
  ssn::Dataset d = ssn::load_libsvm(path("cls.txt").string());
  auto split = ssn::stratified_split(d, {0.6, 5});
  EXPECT_EQ(ja["metric"]["n_test"].get<std::size_t>(), split.test.size());
  EXPECT_EQ(ja["samples"].get<std::size_t>(), split.train.size());
}
