// Copyright 2026 The friendaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "friendaudit/cli.hpp"
#include "test_support.hpp"

namespace friendaudit {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("friendaudit_cli_" + std::string(::testing::UnitTest::GetInstance()
                                                 ->current_test_info()
                                                 ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST(Cli, UsageErrorsExitTwo) {
  CliRun r = cli({});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"stats", "chi2", "1", "2"}).code, 2);
  EXPECT_EQ(cli({"gen", "--out", "x"}).code, 2);  // --seed is required
  EXPECT_EQ(cli({"audit", "--snapshot", "/no/such/file", "--participant", "p", "--seed", "1"}).code,
            2);
}

TEST(Cli, HelpExitsZero) {
  const CliRun r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("validate-rules"), std::string::npos);
}

TEST(Cli, ValidateCanonicalTable) {
  for (const auto& args : {std::vector<std::string>{"validate-rules", "--table", "canonical"},
                           std::vector<std::string>{"validate-rules", "--table", "canonical",
                                                    "--sandbox"}}) {
    const CliRun r = cli(args);
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("total over 675 tuples"), std::string::npos);
    EXPECT_NE(r.out.find("e9ab0eab"), std::string::npos);
  }
}

TEST_F(CliFiles, ValidateBrokenTableExitsOne) {
  std::string text(canonical_rule_text());
  text = text.substr(0, text.rfind("16 |"));
  std::ofstream(path("short.rules")) << text;
  CliRun r = cli({"validate-rules", "--table", path("short.rules")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("not total"), std::string::npos);
  std::ofstream(path("bad.rules")) << "1 | Never | Agree | * | * | * | Nop\n";
  r = cli({"validate-rules", "--table", path("bad.rules")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("DomainMismatch"), std::string::npos);
}

TEST(Cli, ChiSquare) {
  const CliRun r = cli({"stats", "chi2", "52", "9", "12", "7"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("chi2 = 4.41"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("p = 0.036"), std::string::npos) << r.out;
  const CliRun zero = cli({"stats", "chi2", "0", "0", "3", "4"});
  EXPECT_EQ(zero.code, 1);
  EXPECT_NE(zero.err.find("DegenerateMargin"), std::string::npos);
}

TEST_F(CliFiles, Pearson) {
  std::ofstream(path("xy.txt")) << "# x y\n1 3\n2,5\n3 7\n4 9\n";
  const CliRun r = cli({"stats", "pearson", path("xy.txt")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("r = 1.000"), std::string::npos) << r.out;
}

TEST_F(CliFiles, GenerateScreenAndAudit) {
  CliRun r = cli({"gen", "--seed", "3", "--users", "30", "--out", path("snap.jsonl"), "--truth",
               path("truth.jsonl"), "--participants", "40", "--violations", "9",
               "--participants-out", path("people.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = cli({"screen", "--participants", path("people.jsonl"), "--out", path("verdicts.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("retained: 31"), std::string::npos) << r.out;

  std::ifstream snap(path("snap.jsonl"));
  const SocialSnapshot s = load_snapshot(snap);
  const Id participant = s.users().begin()->first;
  r = cli({"audit", "--snapshot", path("snap.jsonl"), "--truth", path("truth.jsonl"),
           "--participant", participant, "--seed", "4", "--sample-size", "5", "--log",
           path("session.jsonl"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::ordered_json::parse(r.out);
  EXPECT_EQ(summary["friends_audited"], 5);
  const std::string log = testing::read_file(path("session.jsonl"));
  EXPECT_EQ(replay_session(log, RuleTable::canonical(false)).log_text(), log);

  r = cli({"audit", "--snapshot", path("snap.jsonl"), "--participant", participant, "--seed",
           "4"});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliFiles, ScriptedAuditAnswersFromFile) {
  std::ofstream(path("snap.jsonl")) << testing::read_file(testing::fixture("pair_features.jsonl"));
  std::ofstream script(path("answers.jsonl"));
  const char* stranger =
      R"("responses":{"q1":"Never","q2":"Never","q3":"Disagree","q4":"Disagree","q5":"Disagree"})";
  for (const char* f : {"F", "c1", "c2", "c3", "x1", "bogus-1", "bogus-2", "bogus-3"}) {
    script << "{\"friend_id\":\"" << f << "\"," << stranger
           << ",\"seconds\":[4,4,4,4,4],\"decision\":\"unfriend\",\"decision_seconds\":3}\n";
  }
  script.close();
  CliRun r = cli({"audit", "--snapshot", path("snap.jsonl"), "--responses", path("answers.jsonl"),
               "--participant", "U", "--seed", "1", "--sample-size", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Unfriend"), std::string::npos);
  r = cli({"audit", "--snapshot", path("snap.jsonl"), "--responses", path("answers.jsonl"),
           "--participant", "U", "--seed", "1", "--sample-size", "6"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("TooFewFriends"), std::string::npos);
}

TEST_F(CliFiles, TrainEvaluateAndWildAudit) {
  ASSERT_EQ(cli({"gen", "--seed", "7", "--users", "24", "--out", path("snap.jsonl"), "--truth",
                 path("truth.jsonl")})
                .code,
            0);
  CliRun r = cli({"evaluate", "--snapshot", path("snap.jsonl"), "--truth", path("truth.jsonl"),
               "--target", "decision", "--algo", "forest", "--k", "10", "--seed", "7", "--out",
               path("report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("actual\\pred"), std::string::npos);
  const auto report = nlohmann::ordered_json::parse(testing::read_file(path("report.json")));
  EXPECT_TRUE(report.contains("confusion_matrix"));
  EXPECT_EQ(report["grouping_violations"], 0);

  r = cli({"train", "--snapshot", path("snap.jsonl"), "--truth", path("truth.jsonl"),
           "--target", "all", "--algo", "tree", "--seed", "7", "--out", path("models")});
  ASSERT_EQ(r.code, 0) << r.err;
  const ModelSet models = load_model_set(path("models"));
  EXPECT_EQ(models.size(), 6u);

  std::ifstream snap(path("snap.jsonl"));
  const SocialSnapshot s = load_snapshot(snap);
  const Id participant = s.users().begin()->first;
  r = cli({"audit", "--snapshot", path("snap.jsonl"), "--participant", participant, "--mode",
           "wild", "--seed", "2", "--sample-size", "4", "--models", path("models")});
  ASSERT_EQ(r.code, 0) << r.err;
  fs::remove(path("models/q3.model"));
  r = cli({"audit", "--snapshot", path("snap.jsonl"), "--participant", participant, "--mode",
           "wild", "--seed", "2", "--sample-size", "4", "--models", path("models")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("MissingModel"), std::string::npos);
}

TEST_F(CliFiles, ConfigFile) {
  std::ofstream(path("cfg.json"))
      << R"({"quality":{"min_avg_response_seconds":5.0},"sandbox_enabled":true,)"
      << R"("learner":{"forest":{"tree_count":7}}})";
  const CliConfig c = load_cli_config(path("cfg.json"));
  EXPECT_DOUBLE_EQ(c.quality.min_avg_response_seconds, 5.0);
  EXPECT_TRUE(c.sandbox_enabled);
  EXPECT_EQ(c.learner.forest.tree_count, 7);
  EXPECT_TRUE(c.rule_table().sandbox_enabled());
  std::ofstream(path("broken.json")) << "{";
  EXPECT_THROW(load_cli_config(path("broken.json")), Error);
  EXPECT_EQ(model_file_name(TargetName::Decision), "decision.model");
}

}  // namespace
}  // namespace friendaudit
