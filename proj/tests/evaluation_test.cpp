#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "sae/error.hpp"
#include "sae/evaluation.hpp"
#include "test_util.hpp"

namespace sae {
namespace {

namespace fs = std::filesystem;

TEST(ConfusionTest, HandCases) {
  const std::vector<std::size_t> truth = {0, 0, 1, 1};
  EXPECT_EQ(confusion(truth, truth), (ConfusionCounts{2, 2, 0, 0}));
  const std::vector<std::size_t> flipped = {1, 1, 0, 0};
  EXPECT_EQ(confusion(flipped, truth), (ConfusionCounts{0, 0, 2, 2}));
  const std::vector<std::size_t> pred = {0, 1, 1, 0};
  EXPECT_EQ(confusion(pred, truth), (ConfusionCounts{1, 1, 1, 1}));
  // Positive class 1 swaps the roles.
  EXPECT_EQ(confusion(std::vector<std::size_t>{1, 1, 1, 0}, truth, 1), (ConfusionCounts{1, 0, 2, 1}));
}

TEST(ConfusionTest, LengthMismatch) {
  EXPECT_THROW(confusion(std::vector<std::size_t>{0, 1}, std::vector<std::size_t>{0}), ShapeError);
}

TEST(ConfusionTest, PermutationInvariant) {
  Rng rng(4);
  std::vector<std::size_t> pred(200), truth(200);
  for (std::size_t i = 0; i < 200; ++i) {
    pred[i] = rng.below(2);
    truth[i] = rng.below(2);
  }
  const ConfusionCounts base = confusion(pred, truth);
  std::vector<std::size_t> order(200);
  for (std::size_t i = 0; i < 200; ++i) order[i] = i;
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> p2, t2;
  for (std::size_t i : order) {
    p2.push_back(pred[i]);
    t2.push_back(truth[i]);
  }
  EXPECT_EQ(confusion(p2, t2), base);
}

TEST(MetricsTest, HandComputed) {
  const Metrics m = metrics(ConfusionCounts{6, 2, 1, 1});
  EXPECT_DOUBLE_EQ(m.accuracy, 0.8);
  EXPECT_DOUBLE_EQ(m.fp_rate_total, 0.1);
  EXPECT_DOUBLE_EQ(m.fn_rate_total, 0.1);
  EXPECT_DOUBLE_EQ(*m.fp_rate_classwise, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(*m.fn_rate_classwise, 1.0 / 7.0);
  EXPECT_DOUBLE_EQ(*m.precision, 6.0 / 7.0);
  EXPECT_DOUBLE_EQ(*m.recall, 6.0 / 7.0);
}

TEST(MetricsTest, TotalRatesPartitionSamples) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    ConfusionCounts c{rng.below(50), rng.below(50), rng.below(50), rng.below(50)};
    if (c.total() == 0) c.tp = 1;
    const Metrics m = metrics(c);
    EXPECT_NEAR(m.accuracy + m.fp_rate_total + m.fn_rate_total, 1.0, 1e-12);
  }
}

TEST(MetricsTest, UndefinedRatiosAreEmpty) {
  const Metrics m = metrics(ConfusionCounts{0, 5, 0, 0});  // no positives at all
  EXPECT_FALSE(m.fn_rate_classwise.has_value());
  EXPECT_FALSE(m.precision.has_value());
  EXPECT_FALSE(m.recall.has_value());
  ASSERT_TRUE(m.fp_rate_classwise.has_value());
  EXPECT_EQ(*m.fp_rate_classwise, 0.0);
  const std::string text = render_metrics(m);
  EXPECT_NE(text.find("precision           undefined"), std::string::npos);
  EXPECT_THROW(metrics(ConfusionCounts{}), EvaluationError);
}

TEST(MetricsTest, PositiveClassSelection) {
  EXPECT_EQ(positive_class_index(std::vector<std::string>{"healthy", "defective"}), 1u);
  EXPECT_EQ(positive_class_index(std::vector<std::string>{"a", "b"}), 0u);
}

TEST(RenderTest, ConfusionTableMentionsCounts) {
  const std::string t = render_confusion(ConfusionCounts{12, 34, 5, 6}, "defective", "healthy");
  for (const char* s : {"defective", "healthy", "12", "34", "5", "6"})
    EXPECT_NE(t.find(s), std::string::npos) << s;
}

TEST(TraceCsvTest, EmptyTraceIsHeaderOnly) {
  test::TempDir dir("csv");
  emit_trace_csv({}, dir / "t.csv");
  std::ifstream in(dir / "t.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 1u);
  EXPECT_TRUE(read_trace_csv(dir / "t.csv").empty());
}

TEST(TraceCsvTest, RoundTrip) {
  test::TempDir dir("csv");
  const TrainingTrace trace = {
      {"pretrain1", 0, 1.0 / 3.0, std::nullopt, std::nullopt},
      {"softmax", 10, 0.6931471805599453, 0.75, 0.5},
      {"finetune", 199, 1e-17, 1.0, std::nullopt},
  };
  emit_trace_csv(trace, dir / "t.csv");
  std::ifstream in(dir / "t.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 4u);
  const TrainingTrace back = read_trace_csv(dir / "t.csv");
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].phase, trace[i].phase);
    EXPECT_EQ(back[i].iteration, trace[i].iteration);
    EXPECT_NEAR(back[i].loss, trace[i].loss, 1e-12);
    EXPECT_EQ(back[i].train_accuracy.has_value(), trace[i].train_accuracy.has_value());
    EXPECT_EQ(back[i].val_accuracy.has_value(), trace[i].val_accuracy.has_value());
  }
  EXPECT_NEAR(*back[1].val_accuracy, 0.5, 1e-12);
}

TEST(TraceCsvTest, UnwritablePath) {
  EXPECT_THROW(emit_trace_csv({}, "/nonexistent/dir/t.csv"), IoError);
}

TEST(WeightsToGrayTest, ConstantAndRamp) {
  const std::vector<double> flat(9, -0.25);
  EXPECT_EQ(weights_to_gray(flat), std::vector<std::uint8_t>(9, 128));
  // (w - min) / range * 255 with min -1, range 2
  const std::vector<double> ramp = {-1.0, -0.5, 0.0, 0.5, 1.0};
  EXPECT_EQ(weights_to_gray(ramp), (std::vector<std::uint8_t>{0, 64, 128, 191, 255}));
}

TEST(VisualizeTest, OneFilePerHiddenUnit) {
  Rng rng(2);
  const std::vector<std::size_t> widths = {16, 5, 3};
  const std::vector<SparsityConfig> sp = {SparsityConfig{}};
  const StackedNetwork net = StackedNetwork::random(widths, 2, sp, 0.001, rng);
  test::TempDir dir("vis");
  const auto files = visualize_weights(net, 1, dir.path());
  ASSERT_EQ(files.size(), 5u);
  EXPECT_EQ(files[0].filename(), "weight_1_0.pgm");
  const RasterImage img = read_pnm(files[4]);
  EXPECT_EQ(img.width, 4u);
  EXPECT_EQ(img.height, 4u);
  EXPECT_EQ(img.channels, 1u);
  EXPECT_EQ(std::vector<std::uint8_t>(img.pixels.begin(), img.pixels.end()),
            weights_to_gray(net.encoders[0].w_enc.row(4)));

  // Layer 2 has width 5: not square without explicit dims.
  EXPECT_THROW(visualize_weights(net, 2, dir.path()), ParameterError);
  EXPECT_EQ(visualize_weights(net, 2, dir.path(), std::pair<std::size_t, std::size_t>{1, 5}).size(), 3u);
  EXPECT_THROW(visualize_weights(net, 3, dir.path()), ParameterError);
  EXPECT_THROW(visualize_weights(net, 0, dir.path()), ParameterError);
}

}  // namespace
}  // namespace sae
