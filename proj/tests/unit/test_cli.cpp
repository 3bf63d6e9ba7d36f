#include <gtest/gtest.h>

#include <cstdlib>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"
#include "scout/error.hpp"

namespace scout {
namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "scout");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

int exit_for(ErrorCode c) { return cli::kExitErrorBase + static_cast<int>(c); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = test::scratch_dir("cli");
    params = (dir / "gen.conf").string();
    test::write_file(params, "n_workloads = 3\nmaster_seed = 4\nrange.noise_sigma = 0.02, 0.02\n");
    test::write_file(dir / "space.csv",
                     "family,size,vcpus_per_node,mem_gb_per_node,price_per_node_hour,node_counts\n"
                     "c4,large,2,3.75,0.1,4;8\nr4,xlarge,4,30.5,0.266,4;8;12\n");
    space = (dir / "space.csv").string();
    db = (dir / "db.csv").string();
    eval_cfg = (dir / "eval.json").string();
    test::write_file(eval_cfg, R"({"repeats": 2, "max_pairs_per_workload": 10, "model": {"n_trees": 5},
                         "methods": [{"name": "scout"}, {"name": "random", "k": 3},
                                     {"name": "coord_descent"}, {"name": "bayesopt"}]})");
    ASSERT_EQ(run({"gen", "--params", params, "--space", space, "--out", db}).code, 0);
  }
  std::filesystem::path dir;
  std::string params, space, db, eval_cfg;
};

TEST(CliBasics, HelpListsSubcommandsAndExitCodes) {
  const Result r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* s : {"gen", "train", "search", "eval", "aggregate", "UsageError", "KTooLarge",
                        "SCOUT_"})
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
  const Result s = run({"search", "--help"});
  for (const char* flag : {"--alpha", "--beta", "--k", "--n-init", "--ei-stop", "--start",
                           "--seed", "--trace-out", "--model", "--train-exclude-self", "0.5"})
    EXPECT_NE(s.out.find(flag), std::string::npos) << flag;
}

TEST(CliBasics, UnknownSubcommandIsUsageError) {
  const Result r = run({"frobnicate"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_EQ(r.err.rfind("UsageError: ", 0), 0u);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"search", "--db"}).code, cli::kExitUsage);
}

TEST(CliBasics, ExitCodesAreDistinct) {
  std::set<int> codes{cli::kExitOk, cli::kExitInternal, cli::kExitUsage};
  for (int c = 0; c < kErrorCodeCount; ++c) codes.insert(exit_for(static_cast<ErrorCode>(c)));
  EXPECT_EQ(codes.size(), 3u + kErrorCodeCount);
  EXPECT_LT(*codes.rbegin(), 126);
}

TEST_F(Cli, GenIsDeterministic) {
  const std::string db2 = (dir / "db2.csv").string();
  ASSERT_EQ(run({"gen", "--params", params, "--space", space, "--out", db2}).code, 0);
  EXPECT_EQ(test::read_file(db), test::read_file(db2));
  const Result r = run({"gen", "--params", params, "--space", space, "--out", "-"});
  EXPECT_EQ(r.out, test::read_file(db));
}

TEST_F(Cli, ScoutNeedsAModel) {
  const Result r = run({"search", "--db", db, "--space", space, "--workload", "wl000"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("--model"), std::string::npos);
}

TEST_F(Cli, TrainThenSearch) {
  const std::string model = (dir / "m.txt").string();
  ASSERT_EQ(run({"train", "--db", db, "--space", space, "--exclude", "wl001", "--model-out", model,
                 "--n-trees", "7"})
                .code,
            0);
  const Result r = run({"search", "--db", db, "--space", space, "--workload", "wl001", "--model",
                        model, "--start", "r4.xlarge:8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("method"), "scout");
  EXPECT_EQ(j.at("steps").at(0).at("config"), "r4.xlarge:8");

  const Result self = run({"search", "--db", db, "--space", space, "--workload", "wl001",
                           "--train-exclude-self", "--n-trees", "5"});
  EXPECT_EQ(self.code, 0) << self.err;
}

TEST_F(Cli, BaselineMethodsWriteTraces) {
  for (const char* m : {"random", "coord_descent", "bayesopt"}) {
    const std::string out = (dir / (std::string(m) + ".json")).string();
    const Result r = run({"search", "--db", db, "--space", space, "--workload", "wl002", "--method",
                          m, "--k", "3", "--trace-out", out});
    ASSERT_EQ(r.code, 0) << m << ": " << r.err;
    EXPECT_EQ(nlohmann::json::parse(test::read_file(out)).at("workload_id"), "wl002");
  }
}

TEST_F(Cli, ModuleErrorsMapToCodes) {
  Result r = run({"search", "--db", db, "--space", space, "--workload", "nope", "--method", "random"});
  EXPECT_EQ(r.code, exit_for(ErrorCode::kUnknownWorkload));
  EXPECT_EQ(r.err.rfind("UnknownWorkload: ", 0), 0u);
  r = run({"search", "--db", db, "--space", space, "--workload", "wl000", "--method", "random",
           "--k", "99"});
  EXPECT_EQ(r.code, exit_for(ErrorCode::kKTooLarge));
  r = run({"search", "--db", db, "--space", space, "--workload", "wl000", "--method",
           "coord_descent", "--start", "m4.large:4"});
  EXPECT_EQ(r.code, exit_for(ErrorCode::kStartOutsideSpace));
  r = run({"search", "--db", (dir / "absent.csv").string(), "--workload", "wl000", "--method", "random"});
  EXPECT_EQ(r.code, exit_for(ErrorCode::kIoError));
  r = run({"search", "--db", db, "--workload", "wl000", "--method", "random"});
  EXPECT_EQ(r.code, exit_for(ErrorCode::kIncompleteGrid)) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  r = run({"search", "--db", db, "--space", space, "--workload", "wl000", "--method", "nelder_mead"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  r = run({"search", "--db", db, "--space", space, "--workload", "wl000", "--alpha", "1.5",
           "--train-exclude-self"});
  EXPECT_EQ(r.code, cli::kExitUsage);
}

TEST_F(Cli, EvalJsonIsByteIdenticalAcrossRunsAndThreads) {
  const std::string a = (dir / "a.json").string(), b = (dir / "b.json").string();
  ASSERT_EQ(run({"eval", "--db", db, "--space", space, "--config", eval_cfg, "--out", a}).code, 0);
  ASSERT_EQ(run({"eval", "--db", db, "--space", space, "--config", eval_cfg, "--out", b,
                 "--threads", "3"})
                .code,
            0);
  EXPECT_EQ(test::read_file(a), test::read_file(b));
  const auto j = nlohmann::json::parse(test::read_file(a));
  EXPECT_EQ(j.at("methods").size(), 4u);
}

TEST_F(Cli, EnvironmentOverridesFlags) {
  const std::string out = (dir / "env.csv").string();
  ::setenv("SCOUT_FORMAT", "csv", 1);
  const Result r = run({"eval", "--db", db, "--space", space, "--config", eval_cfg, "--out", out});
  ::unsetenv("SCOUT_FORMAT");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(test::read_file(out).rfind("method,workload_id,run", 0), 0u);
}

TEST_F(Cli, AggregateBuildsDatabase) {
  std::ostringstream s;
  s << "workload_id,family,size,node_count,sample_idx,m_cpu,m_io\n";
  for (const char* cfg : {"c4,large,4", "c4,large,8", "r4,xlarge,4", "r4,xlarge,8", "r4,xlarge,12"})
    for (int i = 0; i < 3; ++i) s << "job," << cfg << "," << i << "," << i * 0.1 << ",1\n";
  test::write_file(dir / "raw.csv", s.str());
  const Result r =
      run({"aggregate", "--samples", (dir / "raw.csv").string(), "--space", space, "--out", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("workload_id,family,size,node_count,elapsed_s,m_mean_cpu,m_mean_io,m_std_cpu", 0), 0u);
  EXPECT_NE(r.out.find("job,c4,large,4,15,"), std::string::npos);
}

TEST(CliBasics, SpaceSubcommandPrintsDefaultGrid) {
  const Result r = run({"space"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, test::read_file(SCOUT_DATA_DIR "/default_space.csv"));
}

}  // namespace
}  // namespace scout
