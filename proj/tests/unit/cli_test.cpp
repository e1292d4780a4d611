#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vgkit/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = vgkit::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const std::vector<std::string> kSmall{"--set", "data.train_size=40", "--set", "data.val_size=10",
                                      "--set", "data.test_size=20",  "--set", "data.feature_dim=6",
                                      "--set", "model.embed_dim=4",  "--set", "model.query_dim=6",
                                      "--set", "model.fused_dim=8",  "--set", "train.batch_size=8",
                                      "--set", "train.eval_every=5"};

std::vector<std::string> with_small(std::vector<std::string> args) {
  args.insert(args.end(), kSmall.begin(), kSmall.end());
  return args;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("vgkit_cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }
  std::string path(const std::string& name) const { return (root_ / name).string(); }

  fs::path root_;
};

}  // namespace

TEST_F(CliTest, GenerateTrainEvalPipeline) {
  auto g = cli(with_small({"generate", "--out", path("data")}));
  ASSERT_EQ(g.code, 0) << g.err;
  for (const char* f : {"train.jsonl", "val.jsonl", "test.jsonl", "vocab.txt", "config.cfg"}) {
    EXPECT_TRUE(fs::exists(root_ / "data" / f)) << f;
  }

  auto t = cli(with_small({"train", "--data", path("data"), "--out", path("run"), "--iterations", "12"}));
  ASSERT_EQ(t.code, 0) << t.err;
  for (const char* f : {"train_log.csv", "checkpoint_best.ckpt", "checkpoint_final.ckpt", "config.cfg"}) {
    EXPECT_TRUE(fs::exists(root_ / "run" / f)) << f;
  }

  auto e = cli({"eval", "--checkpoint", path("run/checkpoint_best.ckpt"), "--data", path("data"), "--out",
                path("eval")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("S_DIS"), std::string::npos);
  const std::string report = slurp(root_ / "eval" / "report.json");
  EXPECT_NE(report.find("\"checkpoint\""), std::string::npos);
  EXPECT_NE(report.find("\"dataset\""), std::string::npos);
  std::ifstream preds(root_ / "eval" / "predictions.jsonl");
  std::size_t rows = 0;
  for (std::string line; std::getline(preds, line);) ++rows;
  EXPECT_EQ(rows, 20u);
}

TEST_F(CliTest, RepeatRunsAreByteIdentical) {
  for (const char* tag : {"a", "b"}) {
    const std::string t(tag);
    ASSERT_EQ(cli(with_small({"generate", "--out", path("data" + t)})).code, 0);
    ASSERT_EQ(cli(with_small({"train", "--data", path("data" + t), "--out", path("run" + t), "--iterations", "8"})).code,
              0);
    ASSERT_EQ(cli({"eval", "--checkpoint", path("run" + t + "/checkpoint_final.ckpt"), "--data",
                   path("data" + t + "/test.jsonl"), "--out", path("eval" + t)})
                  .code,
              0);
  }
  for (const char* f : {"train.jsonl", "val.jsonl", "test.jsonl", "vocab.txt"}) {
    EXPECT_EQ(slurp(root_ / "dataa" / f), slurp(root_ / "datab" / f)) << f;
  }
  for (const char* f : {"train_log.csv", "checkpoint_best.ckpt", "checkpoint_final.ckpt"}) {
    EXPECT_EQ(slurp(root_ / "runa" / f), slurp(root_ / "runb" / f)) << f;
  }
  for (const char* f : {"report.txt", "predictions.jsonl"}) {
    EXPECT_EQ(slurp(root_ / "evala" / f), slurp(root_ / "evalb" / f)) << f;
  }
}

TEST_F(CliTest, AblateWritesReports) {
  auto a = cli(with_small({"ablate", "--out", path("abl"), "--seeds", "1", "--cells", "high/kld,high/softmax",
                           "--set", "train.iterations=3"}));
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("high/kld"), std::string::npos);
  EXPECT_TRUE(fs::exists(root_ / "abl" / "report.jsonl"));
  EXPECT_NE(slurp(root_ / "abl" / "report.jsonl").find("kld_beats_softmax"), std::string::npos);
}

TEST_F(CliTest, ValidationErrorsExitOne) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({"generate"}).code, 1);  // --out is required
  EXPECT_EQ(cli({"generate", "--out", path("x"), "--bogus"}).code, 1);
  EXPECT_EQ(cli({"generate", "--out", path("x"), "--set", "train.nope=1"}).code, 1);
  EXPECT_EQ(cli({"generate", "--out", path("x"), "--set", "data.num_proposals=0"}).code, 1);
  EXPECT_EQ(cli({"generate", "--out", path("x"), "--config", path("missing.cfg")}).code, 1);
  EXPECT_EQ(cli({"train", "--out", path("r")}).code, 1);  // no dataset
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(CliTest, RefusesToOverwrite) {
  ASSERT_EQ(cli(with_small({"generate", "--out", path("data")})).code, 0);
  const auto again = cli(with_small({"generate", "--out", path("data")}));
  EXPECT_EQ(again.code, 1);
  EXPECT_NE(again.err.find("--overwrite"), std::string::npos);
  EXPECT_EQ(cli(with_small({"generate", "--out", path("data"), "--overwrite"})).code, 0);
}

TEST_F(CliTest, DimensionMismatchExitsOne) {
  ASSERT_EQ(cli(with_small({"generate", "--out", path("data")})).code, 0);
  auto args = with_small({"train", "--data", path("data"), "--out", path("run")});
  args.insert(args.end(), {"--set", "data.feature_dim=7"});
  auto t = cli(args);
  EXPECT_EQ(t.code, 1);
  EXPECT_NE(t.err.find("dimension mismatch"), std::string::npos) << t.err;
}

TEST_F(CliTest, RuntimeFailuresExitTwo) {
  EXPECT_EQ(cli({"eval", "--checkpoint", path("none.ckpt"), "--data", path("none")}).code, 2);
  ASSERT_EQ(cli(with_small({"generate", "--out", path("data")})).code, 0);
  std::ofstream(root_ / "bad.ckpt") << "not a checkpoint";
  EXPECT_EQ(cli({"eval", "--checkpoint", path("bad.ckpt"), "--data", path("data")}).code, 2);
  {
    std::ofstream broken(root_ / "data" / "val.jsonl", std::ios::app);
    broken << "{\"id\": oops\n";
  }
  EXPECT_EQ(cli(with_small({"train", "--data", path("data"), "--out", path("run")})).code, 2);
}

TEST_F(CliTest, NonFiniteLossExitsTwoAndKeepsLog) {
  ASSERT_EQ(cli(with_small({"generate", "--out", path("data")})).code, 0);
  auto t = cli(with_small(
      {"train", "--data", path("data"), "--out", path("run"), "--iterations", "20", "--set", "train.lr=1e300", "--set",
       "loss.gamma=1e300"}));
  EXPECT_EQ(t.code, 2);
  EXPECT_NE(t.err.find("non-finite"), std::string::npos) << t.err;
  EXPECT_TRUE(fs::exists(root_ / "run" / "train_log.csv"));
  EXPECT_FALSE(fs::exists(root_ / "run" / "checkpoint_final.ckpt"));
}
