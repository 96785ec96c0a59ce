#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include "graphost/graph_io.hpp"

namespace fs = std::filesystem;
using namespace graphost;

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           ("graphost-cli-" + std::to_string(::getpid()) + "-" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunResult run(const std::string& args) const {
    const fs::path log = dir_ / "cli.log";
    const std::string cmd = "cd '" + dir_.string() + "' && GRAPHOST_LOG=warn '" +
                            std::string(GRAPHOST_CLI_PATH) + "' " + args + " > '" + log.string() +
                            "' 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
  }

  // Small graphs and short training keep each test under a second.
  void generate_and_train() const {
    ASSERT_EQ(run("--out g generate --n1 60 --n2 60 --p 0.12 --q 0.03 --dim 8").exit_code, 0);
    ASSERT_EQ(run("--out m train --train g/train.json --val g/val.json --max-epochs 80").exit_code, 0);
  }

  fs::path dir_;
};

TEST_F(CliTest, GenerateWritesThreeSplitsDeterministically) {
  ASSERT_EQ(run("--seed 3 --out a generate --n1 20 --n2 20").exit_code, 0);
  ASSERT_EQ(run("--seed 3 --out b generate --n1 20 --n2 20").exit_code, 0);
  for (const char* split : {"train.json", "val.json", "test.json"}) {
    ASSERT_TRUE(fs::exists(dir_ / "a" / split)) << split;
    EXPECT_EQ(slurp(dir_ / "a" / split), slurp(dir_ / "b" / split)) << split;
  }
  EXPECT_NE(slurp(dir_ / "a/train.json"), slurp(dir_ / "a/test.json"));
}

TEST_F(CliTest, GenerateEdgeListFormatRoundTrips) {
  ASSERT_EQ(run("--out e generate --n1 10 --n2 10 --splits train --format edgelist").exit_code, 0);
  const LabeledGraph g = load_graph(dir_ / "e/train", GraphFormat::kEdgeList);
  EXPECT_EQ(g.num_nodes(), 20u);
  EXPECT_TRUE(g.has_labels());
}

TEST_F(CliTest, TrainTargetSelectsCheckpoints) {
  ASSERT_EQ(run("--out g generate --n1 40 --n2 40 --p 0.15 --q 0.03").exit_code, 0);
  ASSERT_EQ(run("--out c train --train g/train.json --target classifier --max-epochs 20").exit_code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "c/classifier.json"));
  EXPECT_FALSE(fs::exists(dir_ / "c/predictor.json"));
  ASSERT_EQ(run("--out p train --train g/train.json --target predictor --max-epochs 20").exit_code, 0);
  EXPECT_FALSE(fs::exists(dir_ / "p/classifier.json"));
  EXPECT_TRUE(fs::exists(dir_ / "p/predictor.json"));
  ASSERT_EQ(run("--out b train --train g/train.json --max-epochs 20").exit_code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "b/classifier.json"));
  EXPECT_TRUE(fs::exists(dir_ / "b/predictor.json"));
  EXPECT_TRUE(fs::exists(dir_ / "b/training_log.json"));
}

TEST_F(CliTest, TrainRejectsSingleEdgeClass) {
  ASSERT_EQ(run("--out g generate --n1 20 --n2 20 --p 0.3 --q 0").exit_code, 0);
  const RunResult r = run("--out m train --train g/train.json --target predictor");
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.output.find("degenerate edge classes"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir_ / "m/predictor.json"));
}

TEST_F(CliTest, TransformWithEverythingOffIsIdentity) {
  generate_and_train();
  ASSERT_EQ(run("--out t transform --test g/test.json --predictor m/predictor.json --mode "
                "homophilic --no-weight --no-filter")
                .exit_code,
            0);
  const WeightedGraph out = load_weighted_graph(dir_ / "t/transformed.json");
  const LabeledGraph in = load_graph(dir_ / "g/test.json");
  EXPECT_EQ(out.graph(), in);
  for (const double w : out.weights()) EXPECT_EQ(w, 1.0);
}

TEST_F(CliTest, TransformReportsHdOnlyWithLabels) {
  generate_and_train();
  ASSERT_EQ(run("--out t transform --test g/test.json --predictor m/predictor.json --train "
                "g/train.json")
                .exit_code,
            0);
  const auto labelled = read_json_file(dir_ / "t/transform_report.json");
  ASSERT_TRUE(labelled.contains("hd"));
  EXPECT_GT(labelled["hd"]["after"].get<double>(), labelled["hd"]["before"].get<double>());

  auto unlabeled = graph_to_json(load_graph(dir_ / "g/test.json").without_labels());
  write_json_file(unlabeled, dir_ / "g/unlabeled.json");
  ASSERT_EQ(run("--out u transform --test g/unlabeled.json --predictor m/predictor.json --mode "
                "homophilic")
                .exit_code,
            0);
  EXPECT_FALSE(read_json_file(dir_ / "u/transform_report.json").contains("hd"));
}

TEST_F(CliTest, AutoModeNeedsTrainingGraph) {
  generate_and_train();
  const RunResult r = run("--out t transform --test g/test.json --predictor m/predictor.json");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("--mode auto needs --train"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir_ / "t"));
}

TEST_F(CliTest, EvaluateIsByteReproducibleWithPinnedTimestamp) {
  generate_and_train();
  const std::string args =
      "--seed 1,2 --pin-timestamp evaluate --classifier m/classifier.json --predictor "
      "m/predictor.json --test g/test.json --train g/train.json";
  const std::string name = "evaluate-00000000T000000Z-s1_2";
  ASSERT_EQ(run("--out r " + args).exit_code, 0);
  const std::string first_json = slurp(dir_ / "r" / (name + ".json"));
  const std::string first_csv = slurp(dir_ / "r" / (name + ".csv"));
  fs::remove_all(dir_ / "r");
  ASSERT_EQ(run("--out r " + args).exit_code, 0);
  EXPECT_EQ(slurp(dir_ / "r" / (name + ".json")), first_json);
  EXPECT_EQ(slurp(dir_ / "r" / (name + ".csv")), first_csv);
  const auto report = read_json_file(dir_ / "r" / (name + ".json"));
  EXPECT_EQ(report["arms"][0]["name"], "base");
  EXPECT_EQ(report["arms"][1]["name"], "graphost");
  EXPECT_EQ(report["config"]["cli"]["subcommand"], "evaluate");
}

TEST_F(CliTest, ConfigFileIsOverriddenByFlags) {
  generate_and_train();
  std::ofstream(dir_ / "cfg.json")
      << R"({"seed": [4], "pin-timestamp": true, "sweep-delta": {"mode": "homophilic", "deltas": [0.0, 0.5]}})";
  const std::string inputs =
      " --classifier m/classifier.json --predictor m/predictor.json --test g/test.json";
  ASSERT_EQ(run("--config cfg.json --out s1 sweep-delta" + inputs).exit_code, 0);
  auto r = read_json_file(dir_ / "s1/sweep-delta-00000000T000000Z-s4.json");
  EXPECT_EQ(r["config"]["deltas"], nlohmann::json({0.0, 0.5}));

  ASSERT_EQ(run("--config cfg.json --out s2 sweep-delta --deltas 0.2" + inputs).exit_code, 0);
  r = read_json_file(dir_ / "s2/sweep-delta-00000000T000000Z-s4.json");
  EXPECT_EQ(r["config"]["deltas"], nlohmann::json({0.2}));
}

TEST_F(CliTest, ExperimentSubcommandsRun) {
  generate_and_train();
  const std::string inputs =
      " --classifier m/classifier.json --predictor m/predictor.json --test g/test.json --mode "
      "homophilic";
  for (const std::string sub : {"ablate", "noise-robustness", "random-drop"}) {
    ASSERT_EQ(run("--pin-timestamp --seed 0,1 --out x " + sub + inputs).exit_code, 0) << sub;
  }
  const std::string prefix = "-00000000T000000Z-s0_1.json";
  EXPECT_TRUE(fs::exists(dir_ / "x" / ("ablation" + prefix)));
  EXPECT_TRUE(fs::exists(dir_ / "x" / ("noise-robustness" + prefix)));
  EXPECT_TRUE(fs::exists(dir_ / "x" / ("random-drop" + prefix)));
}

TEST_F(CliTest, InvalidFlagsLeaveNoOutput) {
  EXPECT_EQ(run("--out bad generate --no-such-flag").exit_code, 2);
  EXPECT_EQ(run("--out bad transform --test x.json --predictor y.json --delta 1.5").exit_code, 2);
  EXPECT_EQ(run("--out bad generate --splits train,holdout").exit_code, 1);
  EXPECT_FALSE(fs::exists(dir_ / "bad"));
}

TEST_F(CliTest, MissingInputFileFails) {
  const RunResult r = run("--out o train --train does-not-exist.json");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_FALSE(fs::exists(dir_ / "o"));
}

TEST_F(CliTest, TheoryValidatePrintsChecks) {
  const RunResult r = run("--pin-timestamp --out th theory-validate --trials 5 --samples 20000");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  for (const char* check : {"PASS lemma-midpoint", "PASS lemma-direction", "PASS closed-form",
                            "PASS constraint", "PASS theorem", "PASS multiclass"}) {
    EXPECT_NE(r.output.find(check), std::string::npos) << check << "\n" << r.output;
  }
  EXPECT_TRUE(fs::exists(dir_ / "th/theory-validate-00000000T000000Z-s0.json"));
  EXPECT_TRUE(fs::exists(dir_ / "th/theory-validate-00000000T000000Z-s0.csv"));
}

TEST_F(CliTest, TheoryValidateRefusesRegimeMismatch) {
  const RunResult r =
      run("--out th theory-validate --p 0.02 --q 0.01 --p-new 0.005 --q-new 0.03");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("is not homophilic"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir_ / "th"));
}

}  // namespace
