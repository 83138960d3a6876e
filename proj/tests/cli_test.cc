#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "gauss_embed/cli.h"
#include "gauss_embed/model_io.h"
#include "gauss_embed/trainer.h"
#include "test_util.h"

namespace gauss_embed {
namespace {

using testing::TempDir;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "gauss-embed");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ::unsetenv("GAUSS_EMBED_SEED");
    std::string text;
    Rng rng(1);
    for (int line = 0; line < 30; ++line) {
      const std::string group = line % 2 ? "x" : "y";
      for (int i = 0; i < 100; ++i) text += group + std::to_string(rng.below(6)) + " ";
      text += "\n";
    }
    corpus_ = dir_.write("corpus.txt", text);
  }

  std::vector<std::string> train_args(const std::string& output) const {
    return {"train", "--corpus", corpus_.string(), "--output", output, "--dim", "6", "--epochs", "1",
            "--min-count", "1", "--subsample", "0", "--negative-table-size", "1000"};
  }

  TempDir dir_;
  std::filesystem::path corpus_;
};

TEST_F(CliTest, TrainNearestEvalExport) {
  const auto model = dir_.file("m.txt").string();
  auto r = run(train_args(model));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("epoch=1 pairs="), std::string::npos);

  r = run({"nearest", "--model", model, "--word", "x1", "--n", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    ++count;
    EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 1) << line;
  }
  EXPECT_EQ(count, 5);

  const auto ds = dir_.write("sim.tsv", "x1\tx2\t9\nx1\ty1\t1\ny2\ty3\t8\nx3\tzzz\t4\n");
  r = run({"eval-sim", "--model", model, "--dataset", ds.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("dataset=sim rho="), std::string::npos);
  EXPECT_NE(r.out.find("covered=3 skipped=1"), std::string::npos);

  const auto ent = dir_.write("ent.tsv", "x1\tx2\t1\nx1\ty1\t0\ny2\ty3\t1\n");
  r = run({"eval-entail", "--model", model, "--dataset", ent.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("entail best_f1="), std::string::npos);

  const auto bin = dir_.file("m.bin").string();
  r = run({"export", "--model", model, "--output", bin, "--format", "binary"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(bitwise_equal(load_model(bin).params, load_model(model).params));

  const auto svg = dir_.file("v.svg").string();
  r = run({"viz", "--model", model, "--words", "x1,x2,y1", "--output", svg});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(testing::read_file(svg).find("<circle"), std::string::npos);
  r = run({"viz", "--model", model, "--words", "x1,x2,y1", "--output", svg, "--pca-global"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
}

TEST_F(CliTest, ZeroEpochsWritesInitialization) {
  const auto model = dir_.file("m0.txt").string();
  auto args = train_args(model);
  args[8] = "0";
  ASSERT_EQ(run(args).code, kExitOk);
  const auto loaded = load_model(model);
  TrainConfig cfg;
  cfg.dim = 6;
  cfg.min_count = 1;
  const auto vocab = build_vocabulary(corpus_, 1);
  EXPECT_TRUE(bitwise_equal(loaded.params, init_params(vocab, cfg, cfg.seed)));
}

TEST_F(CliTest, SeedEnvironmentOverride) {
  const auto a = dir_.file("a.txt").string(), b = dir_.file("b.txt").string(), c = dir_.file("c.txt").string();
  auto args = train_args(a);
  args.insert(args.end(), {"--seed", "5"});
  ASSERT_EQ(run(args).code, kExitOk);
  args[4] = b;
  ::setenv("GAUSS_EMBED_SEED", "9", 1);
  ASSERT_EQ(run(args).code, kExitOk);
  ::unsetenv("GAUSS_EMBED_SEED");
  args[4] = c;
  args.back() = "9";
  ASSERT_EQ(run(args).code, kExitOk);
  EXPECT_NE(testing::read_file(a), testing::read_file(b));
  EXPECT_EQ(testing::read_file(b), testing::read_file(c));
}

TEST_F(CliTest, TrainEiWritesSentinelRow) {
  const auto rel = dir_.write("rel.tsv", "IsA\tx1\ty1\nSynonym\tx2\tx3\nIsA\tx1\tnowhere\nbroken line\n");
  const auto model = dir_.file("ei.txt").string();
  auto args = train_args(model);
  args[0] = "train-ei";
  args.insert(args.end(), {"--relations", rel.string(), "--ei-mode", "isa"});
  const auto r = run(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("kept=2 drop_oov=1 drop_rel=0 drop_malformed=1"), std::string::npos) << r.out;
  EXPECT_TRUE(load_model(model).vocab.contains("<NO_REL>"));

  args.insert(args.end(), {"--relation-whitelist", "IsA,Bogus"});
  EXPECT_EQ(run(args).code, kExitUsage);
}

TEST_F(CliTest, BuildVocab) {
  const auto out = dir_.file("v.txt").string();
  const auto r = run({"build-vocab", "--corpus", corpus_.string(), "--min-count", "1", "--output", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(load_vocabulary(out).words(), build_vocabulary(corpus_, 1).words());
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"train", "--corpus", corpus_.string()}).code, kExitUsage);
  auto args = train_args(dir_.file("m.txt").string());
  args.push_back("--no-such-flag");
  EXPECT_EQ(run(args).code, kExitUsage);
  args.back() = "--negatives";
  args.push_back("0");
  EXPECT_EQ(run(args).code, kExitUsage);

  EXPECT_EQ(run({"nearest", "--model", "/nonexistent/m.txt", "--word", "x"}).code, kExitData);
  const auto garbage = dir_.write("garbage.txt", "#gauss-embed v1 V=1 D=1 cov=spherical b1=1 b2=1\nw 1 -3\n");
  const auto r = run({"nearest", "--model", garbage.string(), "--word", "w"});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("'w'"), std::string::npos);

  const auto model = dir_.file("ok.txt").string();
  ASSERT_EQ(run(train_args(model)).code, kExitOk);
  EXPECT_EQ(run({"nearest", "--model", model, "--word", "unknown"}).code, kExitData);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

}  // namespace
}  // namespace gauss_embed
