#include <gtest/gtest.h>

#include <sys/wait.h>

#include <fstream>
#include <sstream>

#include "test_util.hpp"

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Tiny corpus and schedule so a full train run takes well under a second.
class CliTest : public ::testing::Test {
 protected:
  sae::test::TempDir dir{"cli"};

  Outcome sae(const std::string& args) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(SAE_CLI_PATH) + " " + args + " >" + out.string() + " 2>" +
                            err.string();
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string data() const { return (dir / "data").string(); }

  void synth(std::size_t per_class = 12) {
    const Outcome r = sae("synth --out " + data() + " --per-class " + std::to_string(per_class) +
                      " --side 8 --noise 0.1 --seed 3");
    ASSERT_EQ(r.code, 0) << r.err;
  }

  std::string train_flags(const std::string& out, std::uint64_t seed = 1) const {
    return "train --data " + data() + " --out " + (dir / out).string() +
           " --layers 64,16,8 --target 8x8 --epochs 60,60,100,40 --lr 0.5,0.5,0.5,0.1 --seed " +
           std::to_string(seed);
  }
};

TEST_F(CliTest, TrainWritesArtifacts) {
  synth();
  const Outcome r = sae(train_flags("run"));
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"model.saem", "model.saem.classes", "trace.csv", "report.txt", "config.json"})
    EXPECT_TRUE(fs::exists(dir / "run" / name)) << name;
  EXPECT_NE(r.out.find("accuracy"), std::string::npos);
  EXPECT_EQ(slurp(dir / "run" / "model.saem.classes"), "defective\nhealthy\n");
}

TEST_F(CliTest, SameSeedGivesIdenticalModel) {
  synth();
  ASSERT_EQ(sae(train_flags("a", 5)).code, 0);
  ASSERT_EQ(sae(train_flags("b", 5)).code, 0);
  EXPECT_EQ(slurp(dir / "a" / "model.saem"), slurp(dir / "b" / "model.saem"));
  EXPECT_EQ(slurp(dir / "a" / "trace.csv"), slurp(dir / "b" / "trace.csv"));
}

TEST_F(CliTest, EvalReproducesValidationReport) {
  synth();
  ASSERT_EQ(sae(train_flags("run")).code, 0);
  const std::string run = (dir / "run").string();
  const Outcome r = sae("eval --model " + run + "/model.saem --data " + data() + " --config " + run +
                    "/config.json --subset val");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string report = slurp(dir / "run" / "report.txt");
  const std::string body = r.out.substr(r.out.find('\n') + 1);
  ASSERT_FALSE(body.empty());
  EXPECT_EQ(report.substr(report.size() - std::min(report.size(), body.size())), body);
}

TEST_F(CliTest, EvalOnTrainingSplitOfOverfitRun) {
  synth(6);
  const Outcome t = sae("train --data " + data() + " --out " + (dir / "run").string() +
                    " --layers 64,16 --target 8x8 --epochs 200,300,300 --lr 0.5 --val-fraction 0.3");
  ASSERT_EQ(t.code, 0) << t.err;
  const std::string run = (dir / "run").string();
  const Outcome r = sae("eval --model " + run + "/model.saem --data " + data() + " --config " + run +
                    "/config.json --subset train");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("accuracy            1.0000"), std::string::npos) << r.out;
}

TEST_F(CliTest, MissingDataDirectory) {
  const Outcome r = sae("train --data /nonexistent/corpus --layers 64,16 --target 8x8 --epochs 1,1,1 --lr 0.1 --out " +
                    (dir / "run").string());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("/nonexistent/corpus"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("kind=ingestion"), std::string::npos) << r.err;
}

TEST_F(CliTest, WidthMismatchIsDataError) {
  synth();
  ASSERT_EQ(sae(train_flags("run")).code, 0);
  const Outcome r = sae("eval --model " + (dir / "run" / "model.saem").string() + " --data " + data() +
                    " --target 4x4 --layers 16,8 --epochs 1,1,1 --lr 0.1");
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("64"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("16"), std::string::npos) << r.err;
}

TEST_F(CliTest, PredictAndVisualize) {
  synth();
  ASSERT_EQ(sae(train_flags("run")).code, 0);
  const std::string model = (dir / "run" / "model.saem").string();
  const std::string img = data() + "/healthy/00000.pgm";
  const Outcome p = sae("predict --model " + model + " " + img);
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(p.out.rfind(img, 0), 0u);
  EXPECT_NE(p.out.find("defective="), std::string::npos);

  const Outcome v = sae("visualize --model " + model + " --layer 1 --out " + (dir / "w").string());
  ASSERT_EQ(v.code, 0) << v.err;
  EXPECT_TRUE(fs::exists(dir / "w" / "weight_1_15.pgm"));
  EXPECT_EQ(sae("visualize --model " + model + " --layer 2 --dims 2x8 --out " + (dir / "w").string()).code, 0);
  EXPECT_TRUE(fs::exists(dir / "w" / "weight_2_7.pgm"));
  EXPECT_EQ(sae("visualize --model " + model + " --layer 2 --dims 3x3 --out " + (dir / "w").string()).code, 2);
  EXPECT_EQ(sae("visualize --model " + model + " --layer 3 --out " + (dir / "w").string()).code, 2);
}

TEST_F(CliTest, GradcheckPasses) {
  const Outcome r = sae("gradcheck --seed 3 --configs 4");
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, PrintConfigAndFlagErrors) {
  const Outcome r = sae("train --print-config --layers 64,16 --target 8x8 --epochs 1,2,3 --lr 0.1 --batch-size 4");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"batch_size\": 4"), std::string::npos) << r.out;
  EXPECT_EQ(sae("train --no-such-flag").code, 2);
  EXPECT_EQ(sae("train --print-config --layers 64,16 --epochs 1,2,3 --lr 0.1").code, 2);  // 64 != 270*270
  EXPECT_EQ(sae("eval --model x --data y --subset test").code, 2);
  EXPECT_EQ(sae("").code, 2);
}

}  // namespace
